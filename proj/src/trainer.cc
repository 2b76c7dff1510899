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

#include "hierlogic/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "hierlogic/inference.h"

namespace hierlogic::trainer {
namespace {

// Independent streams derived from one seed.
constexpr std::uint64_t kLayoutStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kNoiseStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kSplitStream = 0x94d049bb133111ebULL;
constexpr std::uint64_t kBatchStream = 0x2545f4914f6cdd1dULL;

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

SyntheticDataset GenerateDataset(const Hierarchy& h, const DatasetSpec& spec) {
  if (spec.height == 0 || spec.width == 0 || spec.feature_dim == 0 || spec.num_blobs == 0)
    throw std::invalid_argument("dataset dimensions must be positive");
  if (!(spec.noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");

  SyntheticDataset data;
  data.spec = spec;
  const std::size_t dim = spec.feature_dim;
  const std::size_t pixels = spec.height * spec.width;

  // Per-node offsets; coarser levels get larger offsets.
  std::mt19937_64 proto_rng(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<double> offsets(h.size() * dim);
  for (const Node& node : h.nodes()) {
    const double scale = spec.prototype_scale * double(node.level) / double(h.levels());
    for (std::size_t d = 0; d < dim; ++d) offsets[node.id * dim + d] = scale * unit(proto_rng);
  }
  data.prototypes.assign(h.num_leaves() * dim, 0.0);
  for (NodeId leaf = 0; leaf < h.num_leaves(); ++leaf)
    for (NodeId v : h.PathOf(leaf))
      for (std::size_t d = 0; d < dim; ++d)
        data.prototypes[leaf * dim + d] += offsets[v * dim + d];

  std::mt19937_64 layout_rng(spec.seed ^ kLayoutStream);
  std::uniform_real_distribution<double> row(0.0, double(spec.height));
  std::uniform_real_distribution<double> col(0.0, double(spec.width));
  std::uniform_int_distribution<NodeId> leaf_pick(0, NodeId(h.num_leaves() - 1));
  struct Blob {
    double r, c;
    NodeId leaf;
  };
  std::vector<Blob> blobs(spec.num_blobs);
  for (Blob& b : blobs) b = {row(layout_rng), col(layout_rng), leaf_pick(layout_rng)};

  std::vector<NodeId> leaves(pixels);
  for (std::size_t y = 0; y < spec.height; ++y) {
    for (std::size_t x = 0; x < spec.width; ++x) {
      double best = std::numeric_limits<double>::infinity();
      NodeId label = 0;
      for (const Blob& b : blobs) {
        const double dr = double(y) + 0.5 - b.r;
        const double dc = double(x) + 0.5 - b.c;
        const double dist = dr * dr + dc * dc;
        if (dist < best) {
          best = dist;
          label = b.leaf;
        }
      }
      leaves[y * spec.width + x] = label;
    }
  }
  data.labels = LabelMap(spec.height, spec.width, std::move(leaves));

  std::mt19937_64 noise_rng(spec.seed ^ kNoiseStream);
  std::normal_distribution<double> noise(0.0, 1.0);
  data.features.assign(dim * pixels, 0.0);
  for (std::size_t k = 0; k < pixels; ++k) {
    const NodeId leaf = data.labels[k];
    for (std::size_t d = 0; d < dim; ++d) {
      // Drawn unconditionally so sigma = 0 consumes the same stream.
      const double eps = noise(noise_rng);
      data.features[d * pixels + k] = data.prototypes[leaf * dim + d] + spec.noise_sigma * eps;
    }
  }
  return data;
}

ScoreMap CorruptedOneHot(const Hierarchy& h, const LabelMap& labels, double flip_rate,
                         std::uint64_t seed) {
  if (!(flip_rate >= 0.0 && flip_rate <= 1.0))
    throw std::invalid_argument("flip rate must lie in [0,1]");
  labels.Validate(h);
  ScoreMap s(h.size(), labels.height(), labels.width(), 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (std::size_t k = 0; k < labels.num_pixels(); ++k) {
    const Path path = h.PathOf(labels[k]);
    for (int l = 1; l <= h.levels(); ++l) {
      NodeId active = path[l - 1];
      const LevelRange range = h.level_range(l);
      if (range.count > 1 && coin(rng) < flip_rate) {
        std::uniform_int_distribution<NodeId> other(0, range.count - 2);
        NodeId pick = range.start + other(rng);
        if (pick >= active) ++pick;
        active = pick;
      }
      s.at(active, k) = 1.0;
    }
  }
  return s;
}

LinearLogicModel LinearLogicModel::Init(std::size_t num_nodes, std::size_t feature_dim,
                                        std::uint64_t seed) {
  LinearLogicModel model;
  model.num_nodes = num_nodes;
  model.feature_dim = feature_dim;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  model.weights.resize(num_nodes * feature_dim);
  for (double& w : model.weights) w = init(rng);
  model.biases.resize(num_nodes);
  for (double& b : model.biases) b = init(rng);
  return model;
}

ScoreMap LinearLogicModel::Forward(const SyntheticDataset& data,
                                   std::span<const std::size_t> pixels) const {
  if (data.spec.feature_dim != feature_dim) throw ShapeError("feature dimension mismatch");
  ScoreMap s(num_nodes, pixels.size());
  std::vector<double> z(pixels.size());
  for (std::size_t v = 0; v < num_nodes; ++v) {
    std::fill(z.begin(), z.end(), biases[v]);
    for (std::size_t d = 0; d < feature_dim; ++d) {
      const double w = weights[v * feature_dim + d];
      const double* x = data.features.data() + d * data.num_pixels();
      for (std::size_t i = 0; i < pixels.size(); ++i) z[i] += w * x[pixels[i]];
    }
    auto out = s.row(v);
    for (std::size_t i = 0; i < pixels.size(); ++i) out[i] = Sigmoid(z[i]);
  }
  return s;
}

void TrainConfig::Validate() const {
  if (!(learning_rate >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (epochs <= 0) throw std::invalid_argument("epochs must be positive");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must lie in (0,1)");
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be >= 0");
  fuzzy::FuzzyConfig{q}.Validate();
}

StandardSuite MakeStandardSuite(std::uint64_t seed) {
  StandardSuite suite;
  suite.spec.seed = seed;
  suite.spec.height = 64;
  suite.spec.width = 64;
  suite.spec.noise_sigma = 1.0;
  suite.train.seed = seed;
  suite.train.epochs = 300;
  return suite;
}

BatchGradient ComputeBatchGradient(const LinearLogicModel& model, const SyntheticDataset& data,
                                   std::span<const std::size_t> pixels, const Hierarchy& h,
                                   const rules::RuleSet& rule_set, const TrainConfig& cfg) {
  const ScoreMap s = model.Forward(data, pixels);
  const ScoreMap y = data.labels.Gather(pixels).MultiHot(h);
  rules::LossOptions options;
  options.alpha = cfg.alpha;
  options.use_c = cfg.use_c;
  options.use_d = cfg.use_d;
  options.use_e = cfg.use_e;
  options.threads = cfg.threads;
  BatchGradient out;
  out.loss = rules::TotalLoss(s, y, rule_set, fuzzy::FuzzyConfig{cfg.q}, options);

  const std::size_t dim = model.feature_dim;
  out.d_weights.assign(model.weights.size(), 0.0);
  out.d_biases.assign(model.biases.size(), 0.0);
  std::vector<double> dz(pixels.size());
  for (std::size_t v = 0; v < model.num_nodes; ++v) {
    auto sv = s.row(v);
    auto gv = out.loss.grad.row(v);
    double db = 0.0;
    for (std::size_t i = 0; i < pixels.size(); ++i) {
      dz[i] = gv[i] * sv[i] * (1.0 - sv[i]);
      db += dz[i];
    }
    out.d_biases[v] = db;
    for (std::size_t d = 0; d < dim; ++d) {
      const double* x = data.features.data() + d * data.num_pixels();
      double acc = 0.0;
      for (std::size_t i = 0; i < pixels.size(); ++i) acc += dz[i] * x[pixels[i]];
      out.d_weights[v * dim + d] = acc;
    }
  }
  return out;
}

PixelSplit SplitPixels(std::size_t num_pixels, double train_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(num_pixels);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed ^ kSplitStream);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * double(num_pixels)));
  PixelSplit split;
  split.train.assign(order.begin(), order.begin() + cut);
  split.held_out.assign(order.begin() + cut, order.end());
  std::sort(split.held_out.begin(), split.held_out.end());
  return split;
}

TrainResult Train(LinearLogicModel model, const SyntheticDataset& data, const Hierarchy& h,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.Validate();
  if (model.num_nodes != h.size()) throw ShapeError("model node count differs from hierarchy");
  const rules::RuleSet rule_set = rules::DeriveRules(h);
  PixelSplit split = SplitPixels(data.num_pixels(), cfg.train_fraction, cfg.seed);
  if (split.train.empty() || split.held_out.empty())
    throw std::invalid_argument("train/held-out split leaves an empty side");
  const LabelMap held_out_labels = data.labels.Gather(split.held_out);
  std::mt19937_64 batch_rng(cfg.seed ^ kBatchStream);

  TrainResult result;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(split.train.begin(), split.train.end(), batch_rng);
    EpochRecord record;
    record.epoch = epoch;
    std::size_t batches = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t first = 0; first < split.train.size(); first += cfg.batch_size) {
      const std::size_t count = std::min(cfg.batch_size, split.train.size() - first);
      const std::span<const std::size_t> batch(split.train.data() + first, count);
      BatchGradient g = ComputeBatchGradient(model, data, batch, h, rule_set, cfg);
      if (!std::isfinite(g.loss.total))
        throw TrainingDiverged("non-finite loss at epoch " + std::to_string(epoch) +
                               ", batch " + std::to_string(batches) +
                               " (lr=" + std::to_string(cfg.learning_rate) + ")");
      for (std::size_t i = 0; i < model.weights.size(); ++i)
        model.weights[i] -= cfg.learning_rate * g.d_weights[i];
      for (std::size_t i = 0; i < model.biases.size(); ++i)
        model.biases[i] -= cfg.learning_rate * g.d_biases[i];
      record.l_c += g.loss.l_c;
      record.l_d += g.loss.l_d;
      record.l_e += g.loss.l_e;
      record.l_bce += g.loss.l_bce;
      record.total += g.loss.total;
      ++batches;
    }
    record.step_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (double* value : {&record.l_c, &record.l_d, &record.l_e, &record.l_bce, &record.total})
      *value /= double(batches);

    const ScoreMap held_scores = model.Forward(data, split.held_out);
    record.violation_rate = metrics::ViolationRate(held_scores, h);
    for (int l = 1; l <= h.levels(); ++l)
      record.level_accuracy.push_back(metrics::LevelAccuracy(held_scores, held_out_labels, h, l));
    if (on_epoch) on_epoch(record);
    result.history.push_back(std::move(record));
  }

  const ScoreMap held_scores = model.Forward(data, split.held_out);
  result.final_report =
      metrics::Evaluate(inference::DecodePaths(held_scores, h), held_out_labels, h);
  result.final_report.violation_rate = metrics::ViolationRate(held_scores, h);
  result.model = std::move(model);
  return result;
}

}  // namespace hierlogic::trainer
