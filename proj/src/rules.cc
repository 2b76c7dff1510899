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

#include "hierlogic/rules.h"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "hierlogic/parallel.h"

namespace hierlogic::rules {
namespace {

using fuzzy::IntPow;
using Rows = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowsMap = Eigen::Map<Rows>;
using ConstRowsMap = Eigen::Map<const Rows>;
using Row = Eigen::Array<double, 1, Eigen::Dynamic>;

ConstRowsMap View(const ScoreMap& s) {
  return {s.values().data(), Eigen::Index(s.num_nodes()), Eigen::Index(s.num_pixels())};
}
RowsMap View(ScoreMap& s) {
  return {s.values().data(), Eigen::Index(s.num_nodes()), Eigen::Index(s.num_pixels())};
}

void CheckInput(const ScoreMap& s, const RuleSet& rules) {
  if (s.num_nodes() != rules.num_nodes)
    throw ShapeError("score map has " + std::to_string(s.num_nodes()) +
                     " node rows, rule set expects " + std::to_string(rules.num_nodes));
  if (s.num_pixels() == 0) throw std::invalid_argument("logic loss over an empty pixel set");
}

// ((1/K) * sum)^(1/q), exact zero for an all-zero sum.
double RootOfMean(double sum, std::size_t count, int q) {
  const double mean = sum / static_cast<double>(count);
  if (mean <= 0.0) return 0.0;
  return q == 1 ? mean : std::pow(mean, 1.0 / q);
}

// Scale turning x^(q-1) into d(generalized mean)/dx, divided by `norm`.
double PartialScale(double mean, int q, std::size_t count, double eps, double norm) {
  const double m = q == 1 ? 1.0 : IntPow(std::max(mean, eps), q - 1);
  return 1.0 / (m * static_cast<double>(count) * norm);
}

// x^(q-1) by repeated multiplication so the loop vectorizes.
template <typename Expr>
Row PowMinusOne(const Expr& x, int q) {
  Row out = Row::Ones(x.size());
  for (int i = 1; i < q; ++i) out *= x;
  return out;
}

}  // namespace

RuleSet DeriveRules(const Hierarchy& h) {
  RuleSet rules;
  rules.num_nodes = h.size();
  rules.num_leaves = h.num_leaves();
  rules.num_roots = h.num_roots();
  for (const Node& node : h.nodes()) {
    if (node.parent) rules.c_rules.push_back({node.id, *node.parent});
    if (!node.children.empty()) rules.d_rules.push_back({node.id, node.children});
    if (!node.peers.empty()) rules.e_rules.push_back({node.id, node.peers});
  }
  return rules;
}

// Both families store x^(q-1) per rule and pixel, with x = s_v * (1 - z) the
// violation truth, then route the chain rule through s_v and z.

RuleLoss CompositionLoss(const ScoreMap& s, const RuleSet& rules,
                         const fuzzy::FuzzyConfig& cfg, int threads) {
  CheckInput(s, rules);
  const std::size_t pixels = s.num_pixels();
  const int q = cfg.q;
  RuleLoss out{0.0, std::vector<double>(rules.num_nodes, 1.0), ScoreMap(s.num_nodes(), pixels)};
  if (rules.c_rules.empty()) return out;
  const double norm = static_cast<double>(rules.num_nodes - rules.num_roots);
  const ConstRowsMap sv = View(s);
  RowsMap grad = View(out.grad);

  Rows lifted(rules.c_rules.size(), pixels);  // x^(q-1)
  std::vector<double> means(rules.c_rules.size());
  ParallelFor(rules.c_rules.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto child = sv.row(rules.c_rules[i].node);
      const auto parent = sv.row(rules.c_rules[i].parent);
      const Row x = child - child * parent;
      lifted.row(i) = PowMinusOne(x, q);
      means[i] = RootOfMean((lifted.row(i) * x).sum(), pixels, q);
    }
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < rules.c_rules.size(); ++i) {
    out.g[rules.c_rules[i].node] = 1.0 - means[i];
    sum += means[i];
  }
  out.value = sum / norm;

  ParallelFor(pixels, threads, [&](std::size_t begin, std::size_t end) {
    const Eigen::Index first = Eigen::Index(begin), width = Eigen::Index(end - begin);
    for (std::size_t i = 0; i < rules.c_rules.size(); ++i) {
      const auto [v, p] = rules.c_rules[i];
      const double scale = PartialScale(means[i], q, pixels, cfg.eps, norm);
      const Row d = lifted.row(i).segment(first, width) * scale;
      grad.row(v).segment(first, width) += d * (1.0 - sv.row(p).segment(first, width));
      grad.row(p).segment(first, width) -= d * sv.row(v).segment(first, width);
    }
  });
  return out;
}

RuleLoss DecompositionLoss(const ScoreMap& s, const RuleSet& rules,
                           const fuzzy::FuzzyConfig& cfg, int threads) {
  CheckInput(s, rules);
  const std::size_t pixels = s.num_pixels();
  const int q = cfg.q;
  RuleLoss out{0.0, std::vector<double>(rules.num_nodes, 1.0), ScoreMap(s.num_nodes(), pixels)};
  if (rules.d_rules.empty()) return out;
  const double norm = static_cast<double>(rules.num_nodes - rules.num_leaves);
  const ConstRowsMap sv = View(s);
  RowsMap grad = View(out.grad);

  const std::size_t n = rules.d_rules.size();
  Rows max_child(n, pixels), lifted(n, pixels);
  Rows argmax(n, pixels);  // child id as double; the first maximum wins ties
  std::vector<double> means(n);
  ParallelFor(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& rule = rules.d_rules[i];
      auto best = max_child.row(i);
      auto arg = argmax.row(i);
      best = sv.row(rule.children.front());
      arg.setConstant(double(rule.children.front()));
      for (std::size_t c = 1; c < rule.children.size(); ++c) {
        const auto row = sv.row(rule.children[c]);
        arg = (row > best).select(double(rule.children[c]), arg);
        best = best.max(row);
      }
      const auto node = sv.row(rule.node);
      const Row x = node - node * best;
      lifted.row(i) = PowMinusOne(x, q);
      means[i] = RootOfMean((lifted.row(i) * x).sum(), pixels, q);
    }
  });
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.g[rules.d_rules[i].node] = 1.0 - means[i];
    sum += means[i];
  }
  out.value = sum / norm;

  ParallelFor(pixels, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId v = rules.d_rules[i].node;
      const double scale = PartialScale(means[i], q, pixels, cfg.eps, norm);
      for (std::size_t k = begin; k < end; ++k) {
        const double d = lifted(i, k) * scale;
        grad(v, k) += d * (1.0 - max_child(i, k));
        grad(NodeId(argmax(i, k)), k) -= d * sv(v, k);
      }
    }
  });
  return out;
}

RuleLoss ExclusionLoss(const ScoreMap& s, const RuleSet& rules,
                       const fuzzy::FuzzyConfig& cfg, int threads) {
  CheckInput(s, rules);
  const std::size_t pixels = s.num_pixels();
  const std::size_t num_nodes = rules.num_nodes;
  const int q = cfg.q;
  RuleLoss out{0.0, std::vector<double>(num_nodes, 1.0), ScoreMap(num_nodes, pixels)};
  if (rules.e_rules.empty()) return out;
  const double norm = static_cast<double>(num_nodes);
  const ConstRowsMap sv = View(s);
  RowsMap grad = View(out.grad);

  // (s_v * s_a)^q == s_v^q * s_a^q, so every pair sum is a dot product of
  // powered rows.
  Rows lifted(num_nodes, pixels), powered(num_nodes, pixels);  // s^(q-1), s^q
  ParallelFor(num_nodes, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      lifted.row(v) = PowMinusOne(sv.row(v), q);
      powered.row(v) = lifted.row(v) * sv.row(v);
    }
  });

  // Pair means, each unordered pair computed once by its lower-id rule.
  Eigen::MatrixXd mean(num_nodes, num_nodes);
  ParallelFor(rules.e_rules.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId v = rules.e_rules[i].node;
      for (NodeId a : rules.e_rules[i].peers) {
        if (a < v) continue;
        const double m = RootOfMean((powered.row(v) * powered.row(a)).sum(), pixels, q);
        mean(v, a) = m;
        mean(a, v) = m;
      }
    }
  });

  std::vector<double> inv_peer_count(num_nodes, 0.0);
  for (const auto& rule : rules.e_rules)
    inv_peer_count[rule.node] = 1.0 / static_cast<double>(rule.peers.size());

  double sum = 0.0;
  for (const auto& rule : rules.e_rules) {
    double pair_sum = 0.0;
    for (NodeId a : rule.peers) pair_sum += mean(rule.node, a);
    const double violation = pair_sum * inv_peer_count[rule.node];
    out.g[rule.node] = 1.0 - violation;
    sum += violation;
  }
  out.value = sum / norm;

  ParallelFor(rules.e_rules.size(), threads, [&](std::size_t begin, std::size_t end) {
    Row acc(pixels);
    for (std::size_t i = begin; i < end; ++i) {
      const NodeId v = rules.e_rules[i].node;
      acc.setZero();
      for (NodeId a : rules.e_rules[i].peers) {
        // Peer relations are symmetric: the pair appears in both rules.
        const double weight = inv_peer_count[v] + inv_peer_count[a];
        acc += (weight * PartialScale(mean(v, a), q, pixels, cfg.eps, norm)) * powered.row(a);
      }
      grad.row(v) = acc * lifted.row(v);
    }
  });
  return out;
}

BceLoss BinaryCrossEntropy(const ScoreMap& s, const ScoreMap& y, double eps,
                           BceReduction reduction) {
  if (s.num_nodes() != y.num_nodes() || s.num_pixels() != y.num_pixels())
    throw ShapeError("BCE: score and label shapes differ");
  if (s.num_pixels() == 0) throw std::invalid_argument("BCE over an empty pixel set");
  const double norm = static_cast<double>(s.num_pixels()) *
                      (reduction == BceReduction::kMean ? static_cast<double>(s.num_nodes())
                                                        : 1.0);
  BceLoss out{0.0, ScoreMap(s.num_nodes(), s.num_pixels())};
  const auto& sv = s.values();
  const auto& yv = y.values();
  auto& gv = out.grad.values();
  double sum = 0.0;
  for (std::size_t i = 0; i < sv.size(); ++i) {
    const bool clamped = sv[i] < eps || sv[i] > 1.0 - eps;
    const double p = std::clamp(sv[i], eps, 1.0 - eps);
    sum -= yv[i] * std::log(p) + (1.0 - yv[i]) * std::log(1.0 - p);
    gv[i] = clamped ? 0.0 : (-yv[i] / p + (1.0 - yv[i]) / (1.0 - p)) / norm;
  }
  out.value = sum / norm;
  return out;
}

LossReport TotalLoss(const ScoreMap& s, const ScoreMap& y, const RuleSet& rules,
                     const fuzzy::FuzzyConfig& cfg, const LossOptions& options) {
  LossReport report;
  BceLoss bce = BinaryCrossEntropy(s, y, cfg.eps, options.bce_reduction);
  report.l_bce = bce.value;
  report.grad = std::move(bce.grad);
  report.g_c.assign(rules.num_nodes, 1.0);
  report.g_d.assign(rules.num_nodes, 1.0);
  report.g_e.assign(rules.num_nodes, 1.0);

  auto absorb = [&](RuleLoss part, double& value, std::vector<double>& g) {
    value = part.value;
    g = std::move(part.g);
    auto& dst = report.grad.values();
    const auto& src = part.grad.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += options.alpha * src[i];
  };
  if (options.use_c) absorb(CompositionLoss(s, rules, cfg, options.threads), report.l_c, report.g_c);
  if (options.use_d) absorb(DecompositionLoss(s, rules, cfg, options.threads), report.l_d, report.g_d);
  if (options.use_e) absorb(ExclusionLoss(s, rules, cfg, options.threads), report.l_e, report.g_e);
  report.total = options.alpha * (report.l_c + report.l_d + report.l_e) + report.l_bce;
  return report;
}

}  // namespace hierlogic::rules
