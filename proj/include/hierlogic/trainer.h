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

#ifndef HIERLOGIC_TRAINER_H_
#define HIERLOGIC_TRAINER_H_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hierlogic/hierarchy.h"
#include "hierlogic/metrics.h"
#include "hierlogic/rules.h"
#include "hierlogic/score_map.h"

namespace hierlogic::trainer {

// Pixels on a height x width grid are split into Voronoi blobs around
// `num_blobs` random centres, each blob carrying one random leaf label.
// Features are the leaf prototype plus isotropic Gaussian noise. Prototypes
// are sums of per-node offsets along the root-to-leaf path, so siblings share
// their ancestors' components.
struct DatasetSpec {
  std::uint64_t seed = 0;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t feature_dim = 16;
  std::size_t num_blobs = 48;
  double noise_sigma = 0.5;
  double prototype_scale = 1.0;
};

struct SyntheticDataset {
  DatasetSpec spec;
  std::vector<double> features;    // [feature_dim, pixels], feature-major
  std::vector<double> prototypes;  // [num_leaves, feature_dim]
  LabelMap labels;

  std::size_t num_pixels() const { return labels.num_pixels(); }
  double feature(std::size_t d, std::size_t k) const { return features[d * num_pixels() + k]; }
};

// Throws std::invalid_argument on zero dimensions.
SyntheticDataset GenerateDataset(const Hierarchy& h, const DatasetSpec& spec);

// Ancestor-closure one-hot map of `labels` where, independently per pixel and
// level, the active node is replaced with probability `flip_rate` by a
// uniformly chosen different node of the same level.
ScoreMap CorruptedOneHot(const Hierarchy& h, const LabelMap& labels, double flip_rate,
                         std::uint64_t seed);

// Per-node sigmoid classifier s = sigmoid(W x + b).
struct LinearLogicModel {
  std::size_t num_nodes = 0;
  std::size_t feature_dim = 0;
  std::vector<double> weights;  // [num_nodes, feature_dim]
  std::vector<double> biases;   // [num_nodes]

  // Uniform [-0.1, 0.1] initialisation.
  static LinearLogicModel Init(std::size_t num_nodes, std::size_t feature_dim,
                               std::uint64_t seed);

  ScoreMap Forward(const SyntheticDataset& data, std::span<const std::size_t> pixels) const;
};

struct TrainConfig {
  double alpha = 0.2;
  int q = 5;
  double learning_rate = 0.5;
  int epochs = 30;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  bool use_c = true;
  bool use_d = true;
  bool use_e = true;
  double train_fraction = 0.8;
  int threads = 1;

  void Validate() const;
};

// The fixed desk-scale benchmark for loss A/B runs: 64x64 pixels, sigma 1.0,
// 300 epochs at the default learning rate. Both seeds are set to `seed`.
struct StandardSuite {
  DatasetSpec spec;
  TrainConfig train;
};
StandardSuite MakeStandardSuite(std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double l_c = 0, l_d = 0, l_e = 0, l_bce = 0, total = 0;  // batch means
  double violation_rate = 0;             // held-out, pre-decode
  std::vector<double> level_accuracy;    // held-out, per level
  double step_seconds = 0;               // forward + loss + backward + update
};

struct TrainResult {
  LinearLogicModel model;
  std::vector<EpochRecord> history;
  metrics::EvalReport final_report;  // decoded held-out paths
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BatchGradient {
  rules::LossReport loss;
  std::vector<double> d_weights;
  std::vector<double> d_biases;
};

// Loss on the given pixels and its gradient with respect to the parameters.
BatchGradient ComputeBatchGradient(const LinearLogicModel& model, const SyntheticDataset& data,
                                   std::span<const std::size_t> pixels, const Hierarchy& h,
                                   const rules::RuleSet& rule_set, const TrainConfig& cfg);

// Deterministic train/held-out split of the dataset's pixels.
struct PixelSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> held_out;
};
PixelSplit SplitPixels(std::size_t num_pixels, double train_fraction, std::uint64_t seed);

using EpochCallback = std::function<void(const EpochRecord&)>;

// Plain mini-batch gradient descent. Throws TrainingDiverged on a non-finite
// loss.
TrainResult Train(LinearLogicModel model, const SyntheticDataset& data, const Hierarchy& h,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

}  // namespace hierlogic::trainer

#endif  // HIERLOGIC_TRAINER_H_
