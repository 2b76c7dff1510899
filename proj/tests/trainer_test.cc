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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "testing.h"

namespace hierlogic::trainer {
namespace {

DatasetSpec SmallSpec(std::uint64_t seed) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.height = 16;
  spec.width = 16;
  return spec;
}

double NearestPrototypeAccuracy(const SyntheticDataset& data, std::size_t leaves) {
  const std::size_t dim = data.spec.feature_dim;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < data.num_pixels(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    NodeId pick = 0;
    for (NodeId leaf = 0; leaf < leaves; ++leaf) {
      double dist = 0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = data.feature(d, k) - data.prototypes[leaf * dim + d];
        dist += diff * diff;
      }
      if (dist < best) {
        best = dist;
        pick = leaf;
      }
    }
    hits += pick == data.labels[k];
  }
  return double(hits) / double(data.num_pixels());
}

TEST(TrainerTest, DatasetIsDeterministicAndValid) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  const SyntheticDataset a = GenerateDataset(h, SmallSpec(3));
  const SyntheticDataset b = GenerateDataset(h, SmallSpec(3));
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.labels.leaves(), b.labels.leaves());
  EXPECT_NE(a.features, GenerateDataset(h, SmallSpec(4)).features);
  EXPECT_NO_THROW(a.labels.Validate(h));
  for (double x : a.features) EXPECT_TRUE(std::isfinite(x));
  DatasetSpec bad = SmallSpec(3);
  bad.width = 0;
  EXPECT_THROW(GenerateDataset(h, bad), std::invalid_argument);
}

TEST(TrainerTest, NoiselessFeaturesAreSeparable) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  DatasetSpec spec = SmallSpec(5);
  spec.noise_sigma = 0.0;
  const SyntheticDataset data = GenerateDataset(h, spec);
  EXPECT_DOUBLE_EQ(NearestPrototypeAccuracy(data, h.num_leaves()), 1.0);
}

TEST(TrainerTest, HeavyNoiseApproachesChance) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  DatasetSpec spec = SmallSpec(6);
  spec.height = spec.width = 48;
  spec.noise_sigma = 100.0;
  const SyntheticDataset data = GenerateDataset(h, spec);
  // Nearest prototype is the optimal rule for isotropic noise and equal
  // priors, so no linear model does better on average.
  EXPECT_LT(NearestPrototypeAccuracy(data, h.num_leaves()), 2.5 / double(h.num_leaves()));
}

TEST(TrainerTest, CorruptedOneHotFlipsWithinLevels) {
  const Hierarchy h = testing::LoadFixture("mapillary");
  const SyntheticDataset data = GenerateDataset(h, SmallSpec(7));
  const ScoreMap clean = CorruptedOneHot(h, data.labels, 0.0, 1);
  EXPECT_EQ(clean.values(), testing::OneHotPaths(h, data.labels.leaves()).values());
  const ScoreMap noisy = CorruptedOneHot(h, data.labels, 0.2, 1);
  std::size_t flips = 0, slots = 0;
  for (std::size_t k = 0; k < noisy.num_pixels(); ++k)
    for (int l = 1; l <= h.levels(); ++l) {
      double sum = 0;
      for (NodeId v = h.level_range(l).start; v < h.level_range(l).end(); ++v) sum += noisy.at(v, k);
      EXPECT_EQ(sum, 1.0);
      flips += noisy.at(h.PathOf(data.labels[k])[l - 1], k) == 0.0;
      ++slots;
    }
  EXPECT_NEAR(double(flips) / double(slots), 0.2, 0.03);
  EXPECT_EQ(noisy.values(), CorruptedOneHot(h, data.labels, 0.2, 1).values());
}

TEST(TrainerTest, BatchGradientMatchesChainRuleAndFiniteDifferences) {
  const Hierarchy h = testing::LoadFixture("toy6");
  DatasetSpec spec = SmallSpec(8);
  spec.feature_dim = 4;
  const SyntheticDataset data = GenerateDataset(h, spec);
  const rules::RuleSet rule_set = rules::DeriveRules(h);
  TrainConfig cfg;
  LinearLogicModel model = LinearLogicModel::Init(h.size(), spec.feature_dim, 9);
  for (double& w : model.weights) w *= 5;
  std::vector<std::size_t> pixels = {0, 5, 17, 40, 100, 200};
  const BatchGradient g = ComputeBatchGradient(model, data, pixels, h, rule_set, cfg);

  // Chain rule on top of the loss module's score gradient.
  const ScoreMap s = model.Forward(data, pixels);
  const rules::LossReport rep = rules::TotalLoss(s, data.labels.Gather(pixels).MultiHot(h),
                                                 rule_set, fuzzy::FuzzyConfig{}, {});
  EXPECT_EQ(rep.total, g.loss.total);
  EXPECT_EQ(rep.grad.values(), g.loss.grad.values());
  for (std::size_t v = 0; v < h.size(); ++v) {
    double db = 0;
    for (std::size_t i = 0; i < pixels.size(); ++i)
      db += rep.grad.at(v, i) * s.at(v, i) * (1 - s.at(v, i));
    EXPECT_NEAR(g.d_biases[v], db, 1e-15);
  }

  auto loss_at = [&](const LinearLogicModel& m) {
    return ComputeBatchGradient(m, data, pixels, h, rule_set, cfg).loss.total;
  };
  std::vector<double> fd_w(model.weights.size()), fd_b(model.biases.size());
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    LinearLogicModel up = model, down = model;
    up.weights[i] += 1e-6;
    down.weights[i] -= 1e-6;
    fd_w[i] = (loss_at(up) - loss_at(down)) / 2e-6;
  }
  for (std::size_t i = 0; i < model.biases.size(); ++i) {
    LinearLogicModel up = model, down = model;
    up.biases[i] += 1e-6;
    down.biases[i] -= 1e-6;
    fd_b[i] = (loss_at(up) - loss_at(down)) / 2e-6;
  }
  EXPECT_LE(testing::RelativeError(g.d_weights, fd_w), 1e-6);
  EXPECT_LE(testing::RelativeError(g.d_biases, fd_b), 1e-6);
}

TEST(TrainerTest, ZeroLearningRateLeavesModelUnchanged) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  const SyntheticDataset data = GenerateDataset(h, SmallSpec(10));
  const LinearLogicModel init = LinearLogicModel::Init(h.size(), 16, 10);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 1;
  cfg.batch_size = 10000;  // one batch covering the whole train split
  const TrainResult r = Train(init, data, h, cfg);
  EXPECT_EQ(r.model.weights, init.weights);
  EXPECT_EQ(r.model.biases, init.biases);
  ASSERT_EQ(r.history.size(), 1u);
  const PixelSplit split = SplitPixels(data.num_pixels(), cfg.train_fraction, cfg.seed);
  const BatchGradient g = ComputeBatchGradient(init, data, split.train, h, rules::DeriveRules(h), cfg);
  EXPECT_NEAR(r.history[0].total, g.loss.total, 1e-12);
}

TEST(TrainerTest, TrainingIsDeterministic) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  const SyntheticDataset data = GenerateDataset(h, SmallSpec(11));
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 11;
  const auto init = LinearLogicModel::Init(h.size(), 16, 11);
  const TrainResult a = Train(init, data, h, cfg);
  cfg.threads = 3;
  const TrainResult b = Train(init, data, h, cfg);
  EXPECT_EQ(a.model.weights, b.model.weights);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].total, b.history[i].total);
    EXPECT_EQ(a.history[i].violation_rate, b.history[i].violation_rate);
  }
}

TEST(TrainerTest, BceOnlyTrainingHalvesBceAndLogsStayInRange) {
  const Hierarchy h = testing::LoadFixture("cityscapes");
  const StandardSuite suite = MakeStandardSuite(12);
  const DatasetSpec& spec = suite.spec;
  const SyntheticDataset data = GenerateDataset(h, spec);
  TrainConfig cfg = suite.train;
  cfg.use_c = cfg.use_d = cfg.use_e = false;
  int calls = 0;
  const TrainResult r = Train(LinearLogicModel::Init(h.size(), spec.feature_dim, 12), data, h, cfg,
                              [&](const EpochRecord&) { ++calls; });
  EXPECT_EQ(calls, cfg.epochs);
  EXPECT_LE(r.history.back().l_bce, 0.5 * r.history.front().l_bce);

  cfg.use_c = cfg.use_d = cfg.use_e = true;
  cfg.epochs = 5;
  const TrainResult full = Train(LinearLogicModel::Init(h.size(), spec.feature_dim, 12), data, h, cfg);
  for (const EpochRecord& e : full.history)
    for (double v : {e.l_c, e.l_d, e.l_e}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
}

TEST(TrainerTest, NonFiniteLossAborts) {
  const Hierarchy h = testing::LoadFixture("toy6");
  const SyntheticDataset data = GenerateDataset(h, SmallSpec(13));
  TrainConfig cfg;
  cfg.learning_rate = std::numeric_limits<double>::infinity();
  cfg.epochs = 2;
  EXPECT_THROW(Train(LinearLogicModel::Init(h.size(), 16, 13), data, h, cfg), TrainingDiverged);
}

TEST(TrainerTest, ConfigValidation) {
  TrainConfig cfg;
  cfg.epochs = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.learning_rate = -1;
  EXPECT_THROW(cfg.Validate(), std::invalid_argument);
}

}  // namespace
}  // namespace hierlogic::trainer
