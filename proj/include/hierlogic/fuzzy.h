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

#ifndef HIERLOGIC_FUZZY_H_
#define HIERLOGIC_FUZZY_H_

#include <algorithm>
#include <cassert>
#include <span>

namespace hierlogic::fuzzy {

// Quantifier exponent and the clamp used inside gradient paths.
struct FuzzyConfig {
  int q = 5;
  double eps = 1e-7;

  // Throws std::invalid_argument unless q >= 1 and 0 < eps < 1e-3.
  void Validate() const;
};

inline bool InUnitInterval(double a) { return a >= 0.0 && a <= 1.0; }

// Goguen conjunction (product t-norm).
inline double TNorm(double a, double b) {
  assert(InUnitInterval(a) && InUnitInterval(b));
  return a * b;
}

// Goedel disjunction.
inline double TConorm(double a, double b) {
  assert(InUnitInterval(a) && InUnitInterval(b));
  return std::max(a, b);
}

inline double Negation(double a) {
  assert(InUnitInterval(a));
  return 1.0 - a;
}

// Reichenbach implication 1 - a + a*b.
inline double Implication(double a, double b) {
  assert(InUnitInterval(a) && InUnitInterval(b));
  return 1.0 - a + a * b;
}

// x^q for integer q >= 0 by repeated squaring; 0^q == 0 for q >= 1.
inline double IntPow(double x, int q) {
  double result = 1.0;
  double base = x;
  while (q > 0) {
    if (q & 1) result *= base;
    base *= base;
    q >>= 1;
  }
  return result;
}

// ((1/K) sum v^q)^(1/q). Throws std::invalid_argument on an empty list.
double GeneralizedMean(std::span<const double> values, int q);

// Existential quantifier: generalized mean of the truths.
double Exists(std::span<const double> values, int q);

// Universal quantifier: 1 - generalized mean of the negated truths.
double Forall(std::span<const double> values, int q);

// d/dx_k of the generalized mean given m = GeneralizedMean(x) and the already
// accumulated count K:  x_k^(q-1) * m^(1-q) / K. `m` is clamped below at eps
// so an all-zero batch yields a zero (q > 1) or 1/K (q == 1) gradient.
inline double GeneralizedMeanPartial(double x, double mean, int q, std::size_t count,
                                     double eps) {
  if (q == 1) return 1.0 / static_cast<double>(count);
  const double m = std::max(mean, eps);
  return IntPow(x, q - 1) / IntPow(m, q - 1) / static_cast<double>(count);
}

}  // namespace hierlogic::fuzzy

#endif  // HIERLOGIC_FUZZY_H_
