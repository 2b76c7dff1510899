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

#ifndef HIERLOGIC_SCORE_MAP_H_
#define HIERLOGIC_SCORE_MAP_H_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hierlogic/hierarchy.h"

namespace hierlogic {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dense node-major tensor [num_nodes, height*width]. Used both for per-node
// confidences and for gradients with respect to them.
class ScoreMap {
 public:
  ScoreMap() = default;
  ScoreMap(std::size_t num_nodes, std::size_t num_pixels, double fill = 0.0)
      : ScoreMap(num_nodes, 1, num_pixels, fill) {}
  ScoreMap(std::size_t num_nodes, std::size_t height, std::size_t width, double fill)
      : num_nodes_(num_nodes),
        height_(height),
        width_(width),
        values_(num_nodes * height * width, fill) {}

  std::size_t num_nodes() const { return num_nodes_; }
  std::size_t num_pixels() const { return height_ * width_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }

  double& at(std::size_t node, std::size_t pixel) { return values_[node * num_pixels() + pixel]; }
  double at(std::size_t node, std::size_t pixel) const {
    return values_[node * num_pixels() + pixel];
  }
  std::span<double> row(std::size_t node) {
    return {values_.data() + node * num_pixels(), num_pixels()};
  }
  std::span<const double> row(std::size_t node) const {
    return {values_.data() + node * num_pixels(), num_pixels()};
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Copies the given pixel columns into a new map of width |pixels|.
  ScoreMap Gather(std::span<const std::size_t> pixels) const;

 private:
  std::size_t num_nodes_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

// Throws ShapeError if the node axis does not match `h`, or
// std::invalid_argument if an entry is non-finite or outside [0,1].
void ValidateScores(const ScoreMap& s, const Hierarchy& h);

// Per-pixel ground-truth leaf ids.
class LabelMap {
 public:
  LabelMap() = default;
  explicit LabelMap(std::vector<NodeId> leaves)
      : height_(1), width_(leaves.size()), leaves_(std::move(leaves)) {}
  LabelMap(std::size_t height, std::size_t width, std::vector<NodeId> leaves);

  std::size_t num_pixels() const { return leaves_.size(); }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  NodeId operator[](std::size_t pixel) const { return leaves_[pixel]; }
  const std::vector<NodeId>& leaves() const { return leaves_; }

  LabelMap Gather(std::span<const std::size_t> pixels) const;

  // Throws std::invalid_argument if any label is not a leaf of `h`.
  void Validate(const Hierarchy& h) const;

  // Multi-hot targets: column k is the ancestor closure of leaf k.
  ScoreMap MultiHot(const Hierarchy& h) const;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<NodeId> leaves_;
};

}  // namespace hierlogic

#endif  // HIERLOGIC_SCORE_MAP_H_
