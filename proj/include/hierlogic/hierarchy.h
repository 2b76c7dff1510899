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

#ifndef HIERLOGIC_HIERARCHY_H_
#define HIERLOGIC_HIERARCHY_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hierlogic {

// Index of a node in the canonical ordering (leaves first, then level 2, ...).
using NodeId = std::uint32_t;

// Malformed hierarchy text (not JSON, or JSON not matching the schema).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structurally invalid hierarchy. `node()` names the offending node.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string node, const std::string& what)
      : std::runtime_error(what), node_(std::move(node)) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

// Which same-level nodes count as mutually exclusive peers.
//   kLevel:    every other node on the same level (index-matrix semantics).
//   kSiblings: only nodes sharing the same parent.
enum class PeerScope { kLevel, kSiblings };

std::string_view ToString(PeerScope scope);
PeerScope PeerScopeFromString(std::string_view text);

struct Node {
  NodeId id = 0;
  std::string name;
  int level = 1;  // 1 = leaf, levels() = root.
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
  std::vector<NodeId> peers;
};

struct LevelRange {
  NodeId start = 0;
  NodeId count = 0;
  NodeId end() const { return start + count; }
};

// One node id per level, index 0 = leaf (level 1), index L-1 = root.
using Path = std::vector<NodeId>;

// Immutable tree-shaped class hierarchy. Multiple roots are allowed; every
// root sits on the top level and every leaf on level 1.
class Hierarchy {
 public:
  // Throws ParseError / ValidationError.
  static Hierarchy Parse(std::string_view json_text,
                         PeerScope scope = PeerScope::kLevel);
  static Hierarchy Load(const std::string& path,
                        PeerScope scope = PeerScope::kLevel);

  const std::string& name() const { return name_; }
  int levels() const { return levels_; }
  std::size_t size() const { return nodes_.size(); }
  PeerScope peer_scope() const { return scope_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::optional<NodeId> Find(std::string_view name) const;
  NodeId IdOf(std::string_view name) const;  // throws std::out_of_range

  // `level` in 1..levels().
  LevelRange level_range(int level) const { return level_ranges_.at(level - 1); }
  const std::vector<LevelRange>& level_ranges() const { return level_ranges_; }
  std::size_t num_leaves() const { return level_ranges_.front().count; }
  std::size_t num_roots() const { return level_ranges_.back().count; }
  bool is_leaf(NodeId id) const { return node(id).level == 1; }

  // Dense |V|x|V| incidence matrices, row-major.
  // parent_matrix()[u*|V|+v] == 1  iff  u is the parent of v.
  // peer_matrix()[u*|V|+v] == 1    iff  u and v are peers.
  const std::vector<std::uint8_t>& parent_matrix() const { return parent_matrix_; }
  const std::vector<std::uint8_t>& peer_matrix() const { return peer_matrix_; }
  bool is_parent(NodeId u, NodeId v) const { return parent_matrix_[u * size() + v] != 0; }
  bool are_peers(NodeId u, NodeId v) const { return peer_matrix_[u * size() + v] != 0; }

  // Multi-hot ground-truth vector over all nodes: ones on the leaf and all of
  // its ancestors. Throws std::invalid_argument for non-leaf ids.
  std::vector<std::uint8_t> AncestorClosure(NodeId leaf) const;

  // Path from `leaf` up to its root (leaf first).
  Path PathOf(NodeId leaf) const;

  // One path per leaf, in leaf id order.
  std::vector<Path> EnumeratePaths() const;

  // True when the per-level choices form a root-to-leaf path.
  bool IsValidPath(std::span<const NodeId> path) const;

 private:
  Hierarchy() = default;

  std::string name_;
  int levels_ = 0;
  PeerScope scope_ = PeerScope::kLevel;
  std::vector<Node> nodes_;
  std::vector<LevelRange> level_ranges_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::vector<std::uint8_t> parent_matrix_;
  std::vector<std::uint8_t> peer_matrix_;
};

}  // namespace hierlogic

#endif  // HIERLOGIC_HIERARCHY_H_
