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

#ifndef HIERLOGIC_METRICS_H_
#define HIERLOGIC_METRICS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "hierlogic/hierarchy.h"
#include "hierlogic/inference.h"
#include "hierlogic/score_map.h"

namespace hierlogic::metrics {

// Per-node true-positive / false-positive / false-negative pixel counts.
// Counts from disjoint pixel sets merge by addition.
struct Confusion {
  std::vector<std::uint64_t> tp, fp, fn;
  std::uint64_t pixels = 0;

  explicit Confusion(std::size_t num_nodes = 0) : tp(num_nodes), fp(num_nodes), fn(num_nodes) {}
  void Add(const inference::PathPrediction& pred, const LabelMap& gt, const Hierarchy& h);
  Confusion& operator+=(const Confusion& other);
};

struct EvalReport {
  std::vector<double> miou_per_level;  // percent, index 0 = level 1
  std::vector<std::optional<double>> per_class_iou;  // empty when union is 0
  std::optional<double> violation_rate;  // set when raw scores were available
  std::uint64_t pixel_count = 0;
};

EvalReport Summarize(const Confusion& confusion, const Hierarchy& h);

// Throws ShapeError when pred and gt cover different pixel counts.
EvalReport Evaluate(const inference::PathPrediction& pred, const LabelMap& gt,
                    const Hierarchy& h);

// Per pixel, takes the arg-max node on every level (ties: lowest id).
std::vector<NodeId> LevelArgmax(const ScoreMap& s, const Hierarchy& h, std::size_t pixel);

// Fraction of pixels whose per-level arg-maxes do not form a valid path.
double ViolationRate(const ScoreMap& s, const Hierarchy& h);

// Fraction of pixels whose level-`level` arg-max equals the ground truth
// ancestor on that level.
double LevelAccuracy(const ScoreMap& s, const LabelMap& gt, const Hierarchy& h, int level);

// Fraction of pixels whose decoded leaf equals the ground-truth leaf.
double LeafAccuracy(const inference::PathPrediction& pred, const LabelMap& gt);

}  // namespace hierlogic::metrics

#endif  // HIERLOGIC_METRICS_H_
