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

#include "hierlogic/metrics.h"

namespace hierlogic::metrics {

void Confusion::Add(const inference::PathPrediction& pred, const LabelMap& gt,
                    const Hierarchy& h) {
  if (pred.num_pixels() != gt.num_pixels())
    throw ShapeError("prediction and ground truth cover different pixel counts");
  if (pred.levels() != h.levels()) throw ShapeError("prediction depth differs from hierarchy");
  gt.Validate(h);
  for (std::size_t k = 0; k < gt.num_pixels(); ++k) {
    const Path truth = h.PathOf(gt[k]);
    for (int l = 0; l < h.levels(); ++l) {
      const NodeId p = pred.path(k)[l];
      const NodeId t = truth[l];
      if (p == t) {
        ++tp[p];
      } else {
        ++fp[p];
        ++fn[t];
      }
    }
  }
  pixels += gt.num_pixels();
}

Confusion& Confusion::operator+=(const Confusion& other) {
  for (std::size_t v = 0; v < tp.size(); ++v) {
    tp[v] += other.tp[v];
    fp[v] += other.fp[v];
    fn[v] += other.fn[v];
  }
  pixels += other.pixels;
  return *this;
}

EvalReport Summarize(const Confusion& confusion, const Hierarchy& h) {
  EvalReport report;
  report.pixel_count = confusion.pixels;
  report.per_class_iou.resize(h.size());
  for (NodeId v = 0; v < h.size(); ++v) {
    const std::uint64_t uni = confusion.tp[v] + confusion.fp[v] + confusion.fn[v];
    if (uni > 0) report.per_class_iou[v] = double(confusion.tp[v]) / double(uni);
  }
  for (const LevelRange& range : h.level_ranges()) {
    double sum = 0.0;
    std::size_t present = 0;
    for (NodeId v = range.start; v < range.end(); ++v) {
      if (!report.per_class_iou[v]) continue;
      sum += *report.per_class_iou[v];
      ++present;
    }
    report.miou_per_level.push_back(present == 0 ? 0.0 : 100.0 * sum / double(present));
  }
  return report;
}

EvalReport Evaluate(const inference::PathPrediction& pred, const LabelMap& gt,
                    const Hierarchy& h) {
  Confusion confusion(h.size());
  confusion.Add(pred, gt, h);
  return Summarize(confusion, h);
}

std::vector<NodeId> LevelArgmax(const ScoreMap& s, const Hierarchy& h, std::size_t pixel) {
  std::vector<NodeId> picks;
  picks.reserve(h.levels());
  for (const LevelRange& range : h.level_ranges()) {
    NodeId best = range.start;
    for (NodeId v = range.start + 1; v < range.end(); ++v)
      if (s.at(v, pixel) > s.at(best, pixel)) best = v;
    picks.push_back(best);
  }
  return picks;
}

double ViolationRate(const ScoreMap& s, const Hierarchy& h) {
  if (s.num_nodes() != h.size()) throw ShapeError("score map does not match hierarchy");
  if (s.num_pixels() == 0) return 0.0;
  std::size_t invalid = 0;
  for (std::size_t k = 0; k < s.num_pixels(); ++k)
    if (!h.IsValidPath(LevelArgmax(s, h, k))) ++invalid;
  return double(invalid) / double(s.num_pixels());
}

double LevelAccuracy(const ScoreMap& s, const LabelMap& gt, const Hierarchy& h, int level) {
  if (s.num_pixels() != gt.num_pixels()) throw ShapeError("score/label pixel counts differ");
  if (gt.num_pixels() == 0) return 0.0;
  const LevelRange range = h.level_range(level);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < gt.num_pixels(); ++k) {
    NodeId best = range.start;
    for (NodeId v = range.start + 1; v < range.end(); ++v)
      if (s.at(v, k) > s.at(best, k)) best = v;
    if (best == h.PathOf(gt[k])[level - 1]) ++hits;
  }
  return double(hits) / double(gt.num_pixels());
}

double LeafAccuracy(const inference::PathPrediction& pred, const LabelMap& gt) {
  if (pred.num_pixels() != gt.num_pixels()) throw ShapeError("prediction/label pixel counts differ");
  if (gt.num_pixels() == 0) return 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < gt.num_pixels(); ++k)
    if (pred.leaf(k) == gt[k]) ++hits;
  return double(hits) / double(gt.num_pixels());
}

}  // namespace hierlogic::metrics
