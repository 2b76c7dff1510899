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

#include "hierlogic/score_map.h"

#include <cmath>
#include <string>

namespace hierlogic {

ScoreMap ScoreMap::Gather(std::span<const std::size_t> pixels) const {
  ScoreMap out(num_nodes_, pixels.size());
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    auto src = row(v);
    auto dst = out.row(v);
    for (std::size_t i = 0; i < pixels.size(); ++i) dst[i] = src[pixels[i]];
  }
  return out;
}

void ValidateScores(const ScoreMap& s, const Hierarchy& h) {
  if (s.num_nodes() != h.size())
    throw ShapeError("score map has " + std::to_string(s.num_nodes()) +
                     " node rows, hierarchy has " + std::to_string(h.size()));
  for (double x : s.values()) {
    if (!std::isfinite(x) || x < 0.0 || x > 1.0)
      throw std::invalid_argument("score entries must be finite and in [0,1]");
  }
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::vector<NodeId> leaves)
    : height_(height), width_(width), leaves_(std::move(leaves)) {
  if (leaves_.size() != height * width)
    throw ShapeError("label map size does not match height*width");
}

LabelMap LabelMap::Gather(std::span<const std::size_t> pixels) const {
  std::vector<NodeId> out(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) out[i] = leaves_[pixels[i]];
  return LabelMap(std::move(out));
}

void LabelMap::Validate(const Hierarchy& h) const {
  for (NodeId leaf : leaves_) {
    if (leaf >= h.size() || !h.is_leaf(leaf))
      throw std::invalid_argument("label " + std::to_string(leaf) + " is not a leaf id");
  }
}

ScoreMap LabelMap::MultiHot(const Hierarchy& h) const {
  Validate(h);
  ScoreMap y(h.size(), height_, width_, 0.0);
  for (std::size_t k = 0; k < leaves_.size(); ++k) {
    for (NodeId v : h.PathOf(leaves_[k])) y.at(v, k) = 1.0;
  }
  return y;
}

}  // namespace hierlogic
