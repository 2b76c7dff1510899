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

#include "hierlogic/fuzzy.h"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hierlogic::fuzzy {

void FuzzyConfig::Validate() const {
  if (q < 1) throw std::invalid_argument("q must be >= 1, got " + std::to_string(q));
  if (!(eps > 0.0 && eps < 1e-3))
    throw std::invalid_argument("eps must lie in (0, 1e-3)");
}

double GeneralizedMean(std::span<const double> values, int q) {
  if (values.empty()) throw std::invalid_argument("quantifier over an empty set");
  if (q < 1) throw std::invalid_argument("q must be >= 1");
  double acc = 0.0;
  for (double v : values) {
    assert(InUnitInterval(v));
    acc += IntPow(v, q);
  }
  const double mean = acc / static_cast<double>(values.size());
  if (mean == 0.0) return 0.0;
  return q == 1 ? mean : std::pow(mean, 1.0 / q);
}

double Exists(std::span<const double> values, int q) { return GeneralizedMean(values, q); }

double Forall(std::span<const double> values, int q) {
  if (values.empty()) throw std::invalid_argument("quantifier over an empty set");
  std::vector<double> negated(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) negated[i] = Negation(values[i]);
  return 1.0 - GeneralizedMean(negated, q);
}

}  // namespace hierlogic::fuzzy
