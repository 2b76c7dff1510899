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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace hierlogic {
namespace {

struct RawNode {
  std::string name;
  int level = 0;
  std::optional<std::string> parent;
};

std::vector<RawNode> ReadRawNodes(const nlohmann::json& doc) {
  const auto& nodes = doc.at("nodes");
  if (!nodes.is_array()) throw ParseError("\"nodes\" must be an array");
  if (nodes.empty()) throw ParseError("\"nodes\" must not be empty");
  std::vector<RawNode> raw;
  raw.reserve(nodes.size());
  for (const auto& entry : nodes) {
    if (!entry.is_object()) throw ParseError("node entries must be objects");
    RawNode node;
    const auto& name = entry.at("name");
    if (!name.is_string() || name.get<std::string>().empty())
      throw ParseError("node \"name\" must be a non-empty string");
    node.name = name.get<std::string>();
    const auto& level = entry.at("level");
    if (!level.is_number_integer())
      throw ParseError("node \"level\" must be an integer: " + node.name);
    node.level = level.get<int>();
    const auto& parent = entry.at("parent");
    if (parent.is_string()) {
      node.parent = parent.get<std::string>();
    } else if (!parent.is_null()) {
      throw ParseError("node \"parent\" must be a string or null: " + node.name);
    }
    raw.push_back(std::move(node));
  }
  return raw;
}

void Validate(const std::vector<RawNode>& raw, int levels) {
  std::unordered_map<std::string, const RawNode*> by_name;
  for (const auto& node : raw) {
    auto [it, inserted] = by_name.emplace(node.name, &node);
    if (!inserted) {
      if (it->second->parent != node.parent)
        throw ValidationError(node.name, "multiple parents: " + node.name);
      throw ValidationError(node.name, "duplicate name: " + node.name);
    }
  }
  for (const auto& node : raw) {
    if (node.level < 1 || node.level > levels) {
      throw ValidationError(node.name, "level out of range: " + node.name +
                                           " has level " + std::to_string(node.level));
    }
  }
  for (const auto& node : raw) {
    std::unordered_set<std::string> seen{node.name};
    const RawNode* cur = &node;
    while (cur->parent) {
      auto it = by_name.find(*cur->parent);
      if (it == by_name.end()) break;
      if (!seen.insert(it->first).second)
        throw ValidationError(node.name, "cycle: through " + node.name);
      cur = it->second;
    }
  }
  for (const auto& node : raw) {
    if (!node.parent) {
      if (node.level != levels)
        throw ValidationError(node.name, "orphan non-root: " + node.name +
                                             " has no parent but level " +
                                             std::to_string(node.level));
      continue;
    }
    auto it = by_name.find(*node.parent);
    if (it == by_name.end())
      throw ValidationError(node.name, "orphan non-root: " + node.name +
                                           " references unknown parent " + *node.parent);
    if (it->second->level != node.level + 1)
      throw ValidationError(node.name, "level gap: " + node.name + " (level " +
                                           std::to_string(node.level) + ") has parent " +
                                           *node.parent + " (level " +
                                           std::to_string(it->second->level) + ")");
  }
}

}  // namespace

std::string_view ToString(PeerScope scope) {
  return scope == PeerScope::kLevel ? "level" : "siblings";
}

PeerScope PeerScopeFromString(std::string_view text) {
  if (text == "level") return PeerScope::kLevel;
  if (text == "siblings") return PeerScope::kSiblings;
  throw std::invalid_argument("unknown peer scope: " + std::string(text));
}

Hierarchy Hierarchy::Load(const std::string& path, PeerScope scope) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open hierarchy file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str(), scope);
}

Hierarchy Hierarchy::Parse(std::string_view json_text, PeerScope scope) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("hierarchy must be a JSON object");

  Hierarchy h;
  std::vector<RawNode> raw;
  try {
    const auto& name = doc.at("name");
    if (!name.is_string()) throw ParseError("\"name\" must be a string");
    h.name_ = name.get<std::string>();
    const auto& levels = doc.at("levels");
    if (!levels.is_number_integer() || levels.get<int>() < 1)
      throw ParseError("\"levels\" must be a positive integer");
    h.levels_ = levels.get<int>();
    raw = ReadRawNodes(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema mismatch: ") + e.what());
  }
  Validate(raw, h.levels_);
  h.scope_ = scope;

  // Canonical ordering: by level ascending, file order within a level.
  std::vector<std::size_t> order(raw.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return raw[a].level < raw[b].level;
  });

  h.nodes_.resize(raw.size());
  for (NodeId id = 0; id < order.size(); ++id) {
    const RawNode& r = raw[order[id]];
    h.nodes_[id].id = id;
    h.nodes_[id].name = r.name;
    h.nodes_[id].level = r.level;
    h.by_name_.emplace(r.name, id);
  }
  for (auto& node : h.nodes_) {
    const RawNode& r = raw[order[node.id]];
    if (r.parent) {
      NodeId parent = h.by_name_.at(*r.parent);
      node.parent = parent;
      h.nodes_[parent].children.push_back(node.id);
    }
  }

  h.level_ranges_.assign(h.levels_, LevelRange{});
  for (const auto& node : h.nodes_) h.level_ranges_[node.level - 1].count++;
  for (int l = 1; l < h.levels_; ++l)
    h.level_ranges_[l].start = h.level_ranges_[l - 1].end();
  for (int l = 0; l < h.levels_; ++l) {
    if (h.level_ranges_[l].count == 0)
      throw ValidationError("", "level gap: level " + std::to_string(l + 1) + " is empty");
  }
  for (const auto& node : h.nodes_) {
    if (node.level > 1 && node.children.empty())
      throw ValidationError(node.name, "childless internal node: " + node.name);
  }

  const std::size_t n = h.nodes_.size();
  h.parent_matrix_.assign(n * n, 0);
  h.peer_matrix_.assign(n * n, 0);
  for (const auto& node : h.nodes_) {
    for (NodeId c : node.children) h.parent_matrix_[node.id * n + c] = 1;
  }
  for (auto& node : h.nodes_) {
    const LevelRange range = h.level_range(node.level);
    for (NodeId other = range.start; other < range.end(); ++other) {
      if (other == node.id) continue;
      if (scope == PeerScope::kSiblings && h.nodes_[other].parent != node.parent) continue;
      node.peers.push_back(other);
      h.peer_matrix_[node.id * n + other] = 1;
    }
  }
  return h;
}

std::optional<NodeId> Hierarchy::Find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

NodeId Hierarchy::IdOf(std::string_view name) const {
  auto id = Find(name);
  if (!id) throw std::out_of_range("unknown node: " + std::string(name));
  return *id;
}

std::vector<std::uint8_t> Hierarchy::AncestorClosure(NodeId leaf) const {
  if (leaf >= size() || !is_leaf(leaf))
    throw std::invalid_argument("ancestor closure requires a leaf id, got " +
                                std::to_string(leaf));
  std::vector<std::uint8_t> y(size(), 0);
  for (NodeId v : PathOf(leaf)) y[v] = 1;
  return y;
}

Path Hierarchy::PathOf(NodeId leaf) const {
  Path path;
  path.reserve(levels_);
  std::optional<NodeId> cur = leaf;
  while (cur) {
    path.push_back(*cur);
    cur = nodes_[*cur].parent;
  }
  return path;
}

std::vector<Path> Hierarchy::EnumeratePaths() const {
  std::vector<Path> paths;
  paths.reserve(num_leaves());
  for (NodeId leaf = 0; leaf < num_leaves(); ++leaf) paths.push_back(PathOf(leaf));
  return paths;
}

bool Hierarchy::IsValidPath(std::span<const NodeId> path) const {
  if (path.size() != static_cast<std::size_t>(levels_)) return false;
  for (int l = 0; l < levels_; ++l) {
    if (path[l] >= size() || nodes_[path[l]].level != l + 1) return false;
    if (l + 1 < levels_ && nodes_[path[l]].parent != path[l + 1]) return false;
  }
  return true;
}

}  // namespace hierlogic
