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

#ifndef HIERLOGIC_RULES_H_
#define HIERLOGIC_RULES_H_

#include <vector>

#include "hierlogic/fuzzy.h"
#include "hierlogic/hierarchy.h"
#include "hierlogic/score_map.h"

namespace hierlogic::rules {

// Composition: node => parent.
struct CompositionRule {
  NodeId node;
  NodeId parent;
};

// Decomposition: node => OR(children).
struct DecompositionRule {
  NodeId node;
  std::vector<NodeId> children;
};

// Exclusion: node => AND(NOT peer), grounded as one-vs-one pairs.
struct ExclusionRule {
  NodeId node;
  std::vector<NodeId> peers;
};

struct RuleSet {
  std::size_t num_nodes = 0;
  std::size_t num_leaves = 0;
  std::size_t num_roots = 0;
  std::vector<CompositionRule> c_rules;
  std::vector<DecompositionRule> d_rules;
  std::vector<ExclusionRule> e_rules;
};

RuleSet DeriveRules(const Hierarchy& h);

// Value of one rule family, per-node truth G (1 for nodes without a rule of
// this family) and dL/ds.
struct RuleLoss {
  double value = 0.0;
  std::vector<double> g;
  ScoreMap grad;
};

// `threads` caps worker parallelism; results are bit-identical for any value.
// All three throw std::invalid_argument when the map has zero pixels.
RuleLoss CompositionLoss(const ScoreMap& s, const RuleSet& rules,
                         const fuzzy::FuzzyConfig& cfg, int threads = 1);
// Subgradient of the max goes to the lowest-id arg-max child.
RuleLoss DecompositionLoss(const ScoreMap& s, const RuleSet& rules,
                           const fuzzy::FuzzyConfig& cfg, int threads = 1);
RuleLoss ExclusionLoss(const ScoreMap& s, const RuleSet& rules,
                       const fuzzy::FuzzyConfig& cfg, int threads = 1);

enum class BceReduction { kMean, kSum };  // over the |V| entries of a pixel

struct BceLoss {
  double value = 0.0;
  ScoreMap grad;
};

// Pixel-averaged binary cross-entropy with scores clamped to [eps, 1-eps].
// Throws ShapeError when s and y differ in shape.
BceLoss BinaryCrossEntropy(const ScoreMap& s, const ScoreMap& y, double eps,
                           BceReduction reduction = BceReduction::kMean);

struct LossOptions {
  double alpha = 0.2;
  bool use_c = true;
  bool use_d = true;
  bool use_e = true;
  BceReduction bce_reduction = BceReduction::kMean;
  int threads = 1;
};

// Disabled families are not evaluated: their value is 0, their G is all ones,
// and they contribute nothing to the gradient.
struct LossReport {
  double l_c = 0.0;
  double l_d = 0.0;
  double l_e = 0.0;
  double l_bce = 0.0;
  double total = 0.0;
  std::vector<double> g_c;
  std::vector<double> g_d;
  std::vector<double> g_e;
  ScoreMap grad;
};

// total = alpha * (l_c + l_d + l_e) + l_bce
LossReport TotalLoss(const ScoreMap& s, const ScoreMap& y, const RuleSet& rules,
                     const fuzzy::FuzzyConfig& cfg, const LossOptions& options);

}  // namespace hierlogic::rules

#endif  // HIERLOGIC_RULES_H_
