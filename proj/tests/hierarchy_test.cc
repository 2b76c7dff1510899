/* Copyright 2026 The hierlogic Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "hierlogic/hierarchy.h"

#include <gtest/gtest.h>

#include <set>

#include "testing.h"

namespace hierlogic {
namespace {

using testing::LoadFixture;
using testing::Toy6;

std::vector<std::string> Names(const Hierarchy& h, const std::vector<NodeId>& ids) {
  std::vector<std::string> out;
  for (NodeId id : ids) out.push_back(h.node(id).name);
  return out;
}

std::string Expect(std::string_view json) {
  try {
    Hierarchy::Parse(json);
  } catch (const ValidationError& e) {
    return e.what();
  } catch (const ParseError& e) {
    return std::string("parse: ") + e.what();
  }
  return "ok";
}

TEST(HierarchyTest, ToyTreeShape) {
  const Hierarchy h = Toy6();
  EXPECT_EQ(h.levels(), 3);
  EXPECT_EQ(h.size(), 6u);
  EXPECT_EQ(h.num_leaves(), 3u);
  EXPECT_EQ(h.num_roots(), 1u);
  EXPECT_EQ(Names(h, h.node(h.IdOf("d")).peers), (std::vector<std::string>{"e", "f"}));
  EXPECT_EQ(Names(h, h.node(h.IdOf("b")).children), (std::vector<std::string>{"d", "e"}));
  EXPECT_TRUE(h.node(h.IdOf("a")).peers.empty());
}

TEST(HierarchyTest, CanonicalOrderingIsLeavesFirstStable) {
  const Hierarchy h = Hierarchy::Parse(R"({"name":"t","levels":2,"nodes":[
      {"name":"r","level":2,"parent":null},
      {"name":"y","level":1,"parent":"r"},
      {"name":"x","level":1,"parent":"r"}]})");
  EXPECT_EQ(h.node(0).name, "y");
  EXPECT_EQ(h.node(1).name, "x");
  EXPECT_EQ(h.node(2).name, "r");
  EXPECT_EQ(h.level_range(1).start, 0u);
  EXPECT_EQ(h.level_range(2).start, 2u);
}

TEST(HierarchyTest, Singleton) {
  const Hierarchy h =
      Hierarchy::Parse(R"({"name":"one","levels":1,"nodes":[{"name":"r","level":1,"parent":null}]})");
  EXPECT_EQ(h.levels(), 1);
  EXPECT_EQ(h.size(), 1u);
  EXPECT_EQ(h.parent_matrix(), std::vector<std::uint8_t>{0});
  EXPECT_EQ(h.peer_matrix(), std::vector<std::uint8_t>{0});
  ASSERT_EQ(h.EnumeratePaths().size(), 1u);
  EXPECT_EQ(h.EnumeratePaths()[0].size(), 1u);
}

TEST(HierarchyTest, FixtureCounts) {
  struct Want {
    std::string name;
    std::vector<std::size_t> per_level;  // leaf level first
  };
  for (const Want& want : {Want{"cityscapes", {19, 6}}, Want{"mapillary", {124, 16, 4}},
                           Want{"pascal_part108", {108, 20}}, Want{"ade20k", {150, 14, 3}}}) {
    const Hierarchy h = LoadFixture(want.name);
    ASSERT_EQ(h.levels(), int(want.per_level.size())) << want.name;
    for (int l = 1; l <= h.levels(); ++l)
      EXPECT_EQ(h.level_range(l).count, want.per_level[l - 1]) << want.name << " level " << l;
  }
  EXPECT_EQ(LoadFixture("mapillary").EnumeratePaths().size(), 124u);
}

TEST(HierarchyTest, AncestorClosure) {
  const Hierarchy h = Toy6();
  auto ones = [&](const std::string& leaf) {
    std::set<std::string> out;
    const auto closure = h.AncestorClosure(h.IdOf(leaf));
    for (NodeId v = 0; v < h.size(); ++v)
      if (closure[v]) out.insert(h.node(v).name);
    return out;
  };
  EXPECT_EQ(ones("d"), (std::set<std::string>{"a", "b", "d"}));
  EXPECT_EQ(ones("f"), (std::set<std::string>{"a", "c", "f"}));
  EXPECT_THROW(h.AncestorClosure(h.IdOf("b")), std::invalid_argument);

  const Hierarchy city = LoadFixture("cityscapes");
  const auto closure = city.AncestorClosure(city.IdOf("car"));
  const NodeId parent = *city.node(city.IdOf("car")).parent;
  for (NodeId v = 0; v < city.size(); ++v)
    EXPECT_EQ(closure[v], v == city.IdOf("car") || v == parent) << city.node(v).name;
}

TEST(HierarchyTest, EnumeratePathsToy) {
  const Hierarchy h = Toy6();
  std::vector<std::vector<std::string>> paths;
  for (const Path& p : h.EnumeratePaths()) paths.push_back(Names(h, p));
  EXPECT_EQ(paths, (std::vector<std::vector<std::string>>{
                       {"d", "b", "a"}, {"e", "b", "a"}, {"f", "c", "a"}}));
  EXPECT_TRUE(h.IsValidPath(h.PathOf(h.IdOf("e"))));
  const std::vector<NodeId> bad = {h.IdOf("d"), h.IdOf("c"), h.IdOf("a")};
  EXPECT_FALSE(h.IsValidPath(bad));
}

TEST(HierarchyTest, ValidationErrors) {
  EXPECT_NE(Expect(R"({"name":"g","levels":3,"nodes":[
      {"name":"r","level":3,"parent":null},{"name":"m","level":2,"parent":"r"},
      {"name":"x","level":1,"parent":"m"},{"name":"y","level":1,"parent":"r"}]})")
                .find("level gap"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":2,"parent":null},{"name":"x","level":1,"parent":null}]})")
                .find("orphan"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":2,"parent":null},{"name":"x","level":1,"parent":"r"},
      {"name":"x","level":1,"parent":"r"}]})")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":2,"parent":null},{"name":"s","level":2,"parent":null},
      {"name":"x","level":1,"parent":"r"},{"name":"x","level":1,"parent":"s"}]})")
                .find("multiple parents"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":2,"parent":null},{"name":"s","level":2,"parent":null},
      {"name":"x","level":1,"parent":"r"}]})")
                .find("childless"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":5,"parent":null}]})")
                .find("level out of range"),
            std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":2,"nodes":[
      {"name":"r","level":2,"parent":"x"},{"name":"x","level":1,"parent":"r"}]})"),
            "ok");
  EXPECT_NE(Expect("{not json").find("parse"), std::string::npos);
  EXPECT_NE(Expect(R"({"name":"g","levels":1,"nodes":[{"name":"r"}]})").find("parse"),
            std::string::npos);
}

TEST(HierarchyTest, ValidationErrorNamesNode) {
  try {
    Hierarchy::Parse(R"({"name":"g","levels":3,"nodes":[
        {"name":"r","level":3,"parent":null},{"name":"m","level":2,"parent":"r"},
        {"name":"x","level":1,"parent":"m"},{"name":"y","level":1,"parent":"r"}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.node(), "y");
  }
}

TEST(HierarchyTest, SiblingPeerScope) {
  const Hierarchy h = Hierarchy::Load(testing::DataPath("hierarchies/toy6.json"),
                                      PeerScope::kSiblings);
  EXPECT_EQ(Names(h, h.node(h.IdOf("d")).peers), (std::vector<std::string>{"e"}));
  EXPECT_TRUE(h.node(h.IdOf("f")).peers.empty());
  EXPECT_EQ(PeerScopeFromString("siblings"), PeerScope::kSiblings);
  EXPECT_THROW(PeerScopeFromString("cousins"), std::invalid_argument);
}

// Structural invariants over fixtures and random forests.
void CheckInvariants(const Hierarchy& h) {
  const std::size_t n = h.size();
  for (NodeId v = 0; v < n; ++v) {
    const Node& node = h.node(v);
    std::size_t row = 0, col = 0;
    for (NodeId u = 0; u < n; ++u) {
      row += h.parent_matrix()[v * n + u];
      col += h.parent_matrix()[u * n + v];
      EXPECT_EQ(h.are_peers(u, v), h.are_peers(v, u));
    }
    EXPECT_EQ(row, node.children.size());
    EXPECT_EQ(col, node.level == h.levels() ? 0u : 1u);
    EXPECT_FALSE(h.are_peers(v, v));
    if (node.parent) EXPECT_EQ(h.node(*node.parent).level, node.level + 1);
    for (NodeId c : node.children) EXPECT_EQ(h.node(c).level, node.level - 1);
    if (node.level == 1) EXPECT_TRUE(node.children.empty());
  }
  for (int l = 1; l <= h.levels(); ++l) {
    const LevelRange r = h.level_range(l);
    for (NodeId v = r.start; v < r.end(); ++v) EXPECT_EQ(h.node(v).level, l);
  }
  const auto paths = h.EnumeratePaths();
  EXPECT_EQ(paths.size(), h.num_leaves());
  std::vector<bool> seen(n, false);
  for (const Path& p : paths) {
    ASSERT_EQ(p.size(), std::size_t(h.levels()));
    EXPECT_TRUE(h.IsValidPath(p));
    for (NodeId v : p) seen[v] = true;
    const auto closure = h.AncestorClosure(p[0]);
    for (int l = 1; l <= h.levels(); ++l) {
      int sum = 0;
      for (NodeId v = h.level_range(l).start; v < h.level_range(l).end(); ++v) sum += closure[v];
      EXPECT_EQ(sum, 1);
    }
  }
  EXPECT_TRUE(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
}

TEST(HierarchyTest, InvariantsOnFixtures) {
  for (const auto& name : testing::FixtureNames()) {
    SCOPED_TRACE(name);
    CheckInvariants(LoadFixture(name));
  }
}

TEST(HierarchyTest, InvariantsOnRandomForests) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const Hierarchy h = testing::RandomHierarchy(rng);
    ASSERT_LE(h.size(), 50u);
    CheckInvariants(h);
  }
}

}  // namespace
}  // namespace hierlogic
