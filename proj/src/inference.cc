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

#include "hierlogic/inference.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hierlogic/parallel.h"

namespace hierlogic::inference {
namespace {

constexpr std::size_t kTilePixels = 512;

using Tile = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;  // [|V|, pixels]

// Reference engine: one literal pass over nodes and neighbours.
ScoreMap ReferenceStep(const ScoreMap& s, const Hierarchy& h, EVariant variant) {
  const std::size_t pixels = s.num_pixels();
  const std::size_t n = h.size();
  ScoreMap next(n, s.height(), s.width(), 0.0);
  std::vector<std::optional<double>> hc(n), hd(n), he(n);
  for (std::size_t k = 0; k < pixels; ++k) {
    for (NodeId v = 0; v < n; ++v) {
      hc[v] = CMessage(s, h, v, k);
      hd[v] = DMessage(s, h, v, k);
      he[v] = EMessage(s, h, v, k);
    }
    for (const Node& node : h.nodes()) {
      const NodeId v = node.id;
      double value = s.at(v, k);
      if (!node.children.empty()) {
        double acc = 0.0;
        for (NodeId c : node.children) acc += s.at(c, k) * *hc[c];
        value += acc / static_cast<double>(node.children.size());
      }
      if (node.parent) value += s.at(*node.parent, k) * *hd[*node.parent];
      if (!node.peers.empty()) {
        const double m = static_cast<double>(node.peers.size());
        double acc = 0.0;
        if (variant == EVariant::kSender) {
          for (NodeId a : node.peers) acc += s.at(a, k) * *he[a];
          value += acc / m;
        } else {
          for (NodeId a : node.peers) acc += s.at(a, k);
          value += *he[v] * (acc / m);
        }
      }
      next.at(v, k) = value;
    }
  }
  LevelSoftmax(next, h);
  return next;
}

// Per-row normalisers and peer groups shared by every tile.
struct MatrixForm {
  Eigen::VectorXd inv_children;  // 1/|C_v|, 0 for leaves
  Eigen::VectorXd inv_peers;     // 1/|A_v|, 0 for peerless nodes
  // Peers are the other members of a group (a level or a sibling set), so a
  // peer sum is the group sum minus the node itself.
  std::vector<Eigen::Index> group;  // group of each node, -1 if peerless
  Eigen::Index num_groups = 0;

  explicit MatrixForm(const Hierarchy& h) {
    const auto n = static_cast<Eigen::Index>(h.size());
    inv_children = Eigen::VectorXd::Zero(n);
    inv_peers = Eigen::VectorXd::Zero(n);
    for (const Node& node : h.nodes()) {
      if (!node.children.empty()) inv_children[node.id] = 1.0 / double(node.children.size());
      if (!node.peers.empty()) inv_peers[node.id] = 1.0 / double(node.peers.size());
    }
    group.assign(h.size(), -1);
    for (const Node& node : h.nodes()) {
      if (node.peers.empty() || group[node.id] >= 0) continue;
      group[node.id] = num_groups;
      for (NodeId a : node.peers) group[a] = num_groups;
      ++num_groups;
    }
    for (const Node& node : h.nodes())
      for (NodeId a : node.peers)
        if (group[a] != group[node.id] || h.node(a).peers.size() != node.peers.size())
          throw std::logic_error("peer relation is not a disjoint union of cliques");
  }

  // out.row(v) = sum over peers a of x.row(a)
  void PeerSum(const Tile& x, Tile& sums, Tile& out) const {
    sums.setZero();
    for (std::size_t v = 0; v < group.size(); ++v)
      if (group[v] >= 0) sums.row(group[v]) += x.row(v);
    for (std::size_t v = 0; v < group.size(); ++v) {
      if (group[v] >= 0) {
        out.row(v) = sums.row(group[v]) - x.row(v);
      } else {
        out.row(v).setZero();
      }
    }
  }
};

void SoftmaxTile(Tile& s, const Hierarchy& h) {
  Eigen::ArrayXd max(s.cols()), sum(s.cols());
  for (const LevelRange& range : h.level_ranges()) {
    auto block = s.middleRows(range.start, range.count).array();
    max = block.row(0).transpose();
    for (Eigen::Index r = 1; r < block.rows(); ++r) max = max.max(block.row(r).transpose());
    sum.setZero();
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      block.row(r) = (block.row(r) - max.transpose()).exp();
      sum += block.row(r).transpose();
    }
    for (Eigen::Index r = 0; r < block.rows(); ++r) block.row(r) /= sum.transpose();
  }
}

// Rows are nodes and columns pixels, so every update below is a contiguous
// row operation. With T the parent->child incidence matrix this computes
//   C: (1/N) [T (s - s^2) + s .* T s^2]
//   D: T^T (s .* hD)
//   E: (1/M) A (s .* hE)  or  hE .* (1/M) A s
void MatrixStep(const Tile& s, const Hierarchy& h, const MatrixForm& form, EVariant variant,
                Tile& update, Tile& scratch, Tile& sums) {
  const Eigen::Index pixels = s.cols();
  Eigen::ArrayXd acc(pixels), max_child(pixels);
  update = s;
  for (const Node& node : h.nodes()) {
    if (node.children.empty()) continue;
    const auto sv = s.row(node.id).array().transpose();
    // Received C-messages.
    acc.setZero();
    for (NodeId c : node.children) {
      const auto sc = s.row(c).array().transpose();
      acc += sc * (1.0 - sc + sc * sv);
    }
    update.row(node.id).array() += (acc * form.inv_children[node.id]).transpose();
    // D-message sent to every child.
    max_child = s.row(node.children.front()).array().transpose();
    for (NodeId c : node.children) max_child = max_child.max(s.row(c).array().transpose());
    acc = sv * (1.0 - sv + sv * max_child);
    for (NodeId c : node.children) update.row(c).array() += acc.transpose();
  }

  // scratch <- peer mean, then the E-message hE = -(1 - s .* mean).
  form.PeerSum(s, sums, scratch);
  scratch.array().colwise() *= form.inv_peers.array();
  if (variant == EVariant::kReceiver) {
    update.array() -= (1.0 - s.array() * scratch.array()) * scratch.array();
  } else {
    scratch.array() = -s.array() * (1.0 - s.array() * scratch.array());
    Tile received(s.rows(), pixels);
    form.PeerSum(scratch, sums, received);
    update.array() += received.array().colwise() * form.inv_peers.array();
  }
  SoftmaxTile(update, h);
}

ScoreMap RunMatrix(const ScoreMap& s, const Hierarchy& h, int iterations, EVariant variant,
                   int threads) {
  const MatrixForm form(h);
  const std::size_t pixels = s.num_pixels();
  const std::size_t n = h.size();
  ScoreMap out(n, s.height(), s.width(), 0.0);
  const std::size_t tiles = (pixels + kTilePixels - 1) / kTilePixels;
  ParallelFor(tiles, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const std::size_t first = t * kTilePixels;
      const std::size_t width = std::min(kTilePixels, pixels - first);
      Tile tile(n, width);
      for (std::size_t v = 0; v < n; ++v)
        tile.row(v) = Eigen::Map<const Eigen::RowVectorXd>(s.values().data() + v * pixels + first, width);
      if (iterations == 0) SoftmaxTile(tile, h);
      Tile next(n, width), scratch(n, width), sums(form.num_groups, width);
      for (int it = 0; it < iterations; ++it) {
        MatrixStep(tile, h, form, variant, next, scratch, sums);
        tile.swap(next);
      }
      for (std::size_t v = 0; v < n; ++v)
        Eigen::Map<Eigen::RowVectorXd>(&out.at(v, first), width) = tile.row(v);
    }
  });
  return out;
}

ScoreMap RunReference(const ScoreMap& s, const Hierarchy& h, int iterations, EVariant variant) {
  if (iterations == 0) {
    ScoreMap out = s;
    LevelSoftmax(out, h);
    return out;
  }
  ScoreMap cur = ReferenceStep(s, h, variant);
  for (int it = 1; it < iterations; ++it) cur = ReferenceStep(cur, h, variant);
  return cur;
}

}  // namespace

std::string_view ToString(Engine engine) {
  return engine == Engine::kReference ? "reference" : "matrix";
}

std::string_view ToString(EVariant variant) {
  return variant == EVariant::kSender ? "sender" : "receiver";
}

Engine EngineFromString(std::string_view text) {
  if (text == "reference") return Engine::kReference;
  if (text == "matrix") return Engine::kMatrix;
  throw std::invalid_argument("unknown engine: " + std::string(text));
}

EVariant EVariantFromString(std::string_view text) {
  if (text == "sender") return EVariant::kSender;
  if (text == "receiver") return EVariant::kReceiver;
  throw std::invalid_argument("unknown e-variant: " + std::string(text));
}

std::optional<double> CMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k) {
  const auto& parent = h.node(v).parent;
  if (!parent) return std::nullopt;
  const double sv = s.at(v, k);
  return 1.0 - sv + sv * s.at(*parent, k);
}

std::optional<double> DMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k) {
  const auto& children = h.node(v).children;
  if (children.empty()) return std::nullopt;
  double max_child = s.at(children.front(), k);
  for (NodeId c : children) max_child = std::max(max_child, s.at(c, k));
  const double sv = s.at(v, k);
  return 1.0 - sv + sv * max_child;
}

std::optional<double> EMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k) {
  const auto& peers = h.node(v).peers;
  if (peers.empty()) return std::nullopt;
  const double sv = s.at(v, k);
  double acc = 0.0;
  for (NodeId a : peers) acc += sv * s.at(a, k);
  return -(1.0 - acc / static_cast<double>(peers.size()));
}

void LevelSoftmax(ScoreMap& s, const Hierarchy& h) {
  for (std::size_t k = 0; k < s.num_pixels(); ++k) {
    for (const LevelRange& range : h.level_ranges()) {
      double max = -std::numeric_limits<double>::infinity();
      for (NodeId v = range.start; v < range.end(); ++v) max = std::max(max, s.at(v, k));
      double sum = 0.0;
      for (NodeId v = range.start; v < range.end(); ++v) {
        s.at(v, k) = std::exp(s.at(v, k) - max);
        sum += s.at(v, k);
      }
      for (NodeId v = range.start; v < range.end(); ++v) s.at(v, k) /= sum;
    }
  }
}

ScoreMap MessagePassingStep(const ScoreMap& s, const Hierarchy& h, const InferenceConfig& cfg) {
  InferenceConfig one = cfg;
  one.iterations = 1;
  return RunInference(s, h, one);
}

ScoreMap RunInference(const ScoreMap& s, const Hierarchy& h, const InferenceConfig& cfg) {
  ValidateScores(s, h);
  if (cfg.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  if (cfg.engine == Engine::kReference) return RunReference(s, h, cfg.iterations, cfg.e_variant);
  return RunMatrix(s, h, cfg.iterations, cfg.e_variant, cfg.threads);
}

PathPrediction PathPrediction::FromLeaves(const Hierarchy& h, std::span<const NodeId> leaves,
                                          std::size_t height, std::size_t width) {
  if (leaves.size() != height * width) throw ShapeError("leaf count does not match height*width");
  PathPrediction out(h.levels(), height, width);
  for (std::size_t k = 0; k < leaves.size(); ++k) {
    if (leaves[k] >= h.size() || !h.is_leaf(leaves[k]))
      throw std::invalid_argument("not a leaf id: " + std::to_string(leaves[k]));
    const Path path = h.PathOf(leaves[k]);
    std::copy(path.begin(), path.end(), out.path(k).begin());
    out.score(k) = 0.0;
  }
  return out;
}

ScoreMap PathPrediction::ToOneHot(const Hierarchy& h) const {
  ScoreMap s(h.size(), height_, width_, 0.0);
  for (std::size_t k = 0; k < num_pixels(); ++k)
    for (NodeId v : path(k)) s.at(v, k) = 1.0;
  return s;
}

PathPrediction DecodePaths(const ScoreMap& s, const Hierarchy& h, int threads) {
  if (s.num_nodes() != h.size()) throw ShapeError("score map does not match hierarchy");
  PathPrediction out(h.levels(), s.height(), s.width());
  const std::size_t n = h.size();
  ParallelFor(s.num_pixels(), threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> best(n);
    std::vector<NodeId> best_leaf(n);
    for (std::size_t k = begin; k < end; ++k) {
      // Leaves precede their ancestors in the canonical order, so one forward
      // sweep sees every child before its parent.
      for (const Node& node : h.nodes()) {
        if (node.children.empty()) {
          best[node.id] = s.at(node.id, k);
          best_leaf[node.id] = node.id;
          continue;
        }
        NodeId pick = node.children.front();
        for (NodeId c : node.children) {
          if (best[c] > best[pick] || (best[c] == best[pick] && best_leaf[c] < best_leaf[pick]))
            pick = c;
        }
        best[node.id] = s.at(node.id, k) + best[pick];
        best_leaf[node.id] = best_leaf[pick];
      }
      const LevelRange roots = h.level_range(h.levels());
      NodeId pick = roots.start;
      for (NodeId r = roots.start; r < roots.end(); ++r) {
        if (best[r] > best[pick] || (best[r] == best[pick] && best_leaf[r] < best_leaf[pick]))
          pick = r;
      }
      const Path path = h.PathOf(best_leaf[pick]);
      std::copy(path.begin(), path.end(), out.path(k).begin());
      out.score(k) = best[pick];
    }
  });
  return out;
}

}  // namespace hierlogic::inference
