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

#ifndef HIERLOGIC_INFERENCE_H_
#define HIERLOGIC_INFERENCE_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "hierlogic/hierarchy.h"
#include "hierlogic/score_map.h"

namespace hierlogic::inference {

// kReference loops over nodes and neighbours per pixel; kMatrix evaluates the
// same update with vectorized row kernels over pixel tiles.
enum class Engine { kReference, kMatrix };

// How a node aggregates exclusion messages from its peers.
//   kSender:   (1/M) * sum_a s[a] * hE(a)   (each message weighted by its sender)
//   kReceiver: hE(v) * (1/M) * sum_a s[a]   (the node's own message times the
//                                            mean peer score)
enum class EVariant { kSender, kReceiver };

std::string_view ToString(Engine engine);
std::string_view ToString(EVariant variant);
Engine EngineFromString(std::string_view text);
EVariant EVariantFromString(std::string_view text);

struct InferenceConfig {
  int iterations = 2;
  Engine engine = Engine::kMatrix;
  EVariant e_variant = EVariant::kSender;
  int threads = 1;
};

// Messages sent by node v on pixel k. std::nullopt when v lacks the neighbour
// the message is addressed to (root for C, leaf for D, peerless for E).
//   C: v => parent            1 - s[v] + s[v]*s[p]
//   D: v => OR(children)      1 - s[v] + s[v]*max_c s[c]
//   E: -(v => AND(NOT peers)) -(1 - (1/M) sum_a s[v]*s[a])
std::optional<double> CMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k);
std::optional<double> DMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k);
std::optional<double> EMessage(const ScoreMap& s, const Hierarchy& h, NodeId v, std::size_t k);

// In-place softmax over each level's entries, per pixel.
void LevelSoftmax(ScoreMap& s, const Hierarchy& h);

// One synchronous update of every node from the received messages, followed
// by the level softmax. Ignores cfg.iterations.
ScoreMap MessagePassingStep(const ScoreMap& s, const Hierarchy& h, const InferenceConfig& cfg);

// cfg.iterations message-passing steps; zero iterations returns the level
// softmax of the input.
ScoreMap RunInference(const ScoreMap& s, const Hierarchy& h, const InferenceConfig& cfg);

class PathPrediction {
 public:
  PathPrediction() = default;
  PathPrediction(int levels, std::size_t height, std::size_t width)
      : levels_(levels),
        height_(height),
        width_(width),
        nodes_(static_cast<std::size_t>(levels) * height * width),
        scores_(height * width) {}

  int levels() const { return levels_; }
  std::size_t num_pixels() const { return scores_.size(); }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  // Leaf first, root last.
  std::span<NodeId> path(std::size_t k) { return {nodes_.data() + k * levels_, std::size_t(levels_)}; }
  std::span<const NodeId> path(std::size_t k) const {
    return {nodes_.data() + k * levels_, std::size_t(levels_)};
  }
  NodeId leaf(std::size_t k) const { return nodes_[k * levels_]; }
  NodeId at_level(std::size_t k, int level) const { return nodes_[k * levels_ + level - 1]; }
  double& score(std::size_t k) { return scores_[k]; }
  double score(std::size_t k) const { return scores_[k]; }

  // One path per pixel, one level-1 leaf id per pixel.
  static PathPrediction FromLeaves(const Hierarchy& h, std::span<const NodeId> leaves,
                                   std::size_t height, std::size_t width);

  // One-hot score map with ones along each pixel's path.
  ScoreMap ToOneHot(const Hierarchy& h) const;

 private:
  int levels_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<NodeId> nodes_;
  std::vector<double> scores_;
};

// Per pixel, the root-to-leaf path with maximal summed score; ties go to the
// lowest leaf id.
PathPrediction DecodePaths(const ScoreMap& s, const Hierarchy& h, int threads = 1);

}  // namespace hierlogic::inference

#endif  // HIERLOGIC_INFERENCE_H_
