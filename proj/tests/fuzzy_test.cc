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

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace hierlogic::fuzzy {
namespace {

TEST(FuzzyTest, Connectives) {
  EXPECT_DOUBLE_EQ(TNorm(1.0, 0.37), 0.37);
  EXPECT_DOUBLE_EQ(TNorm(0.5, 0.5), 0.25);
  EXPECT_DOUBLE_EQ(TConorm(0.3, 0.7), 0.7);
  EXPECT_DOUBLE_EQ(Negation(0.25), 0.75);
  EXPECT_DOUBLE_EQ(Implication(1.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(Implication(0.0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(Implication(0.0, 1.0), 1.0);
  EXPECT_NEAR(Implication(0.8, 0.9), 0.92, 1e-15);
}

TEST(FuzzyTest, ProductChainCollapses) {
  double chain = 1.0;
  for (int i = 0; i < 10; ++i) chain = TNorm(chain, 0.9);
  EXPECT_NEAR(chain, 0.3486784401, 1e-12);
}

TEST(FuzzyTest, Quantifiers) {
  const std::vector<double> v = {0.9, 0.5};
  // High-precision values computed offline.
  EXPECT_NEAR(Forall(v, 5), 0.564696864299003086, 1e-14);
  EXPECT_NEAR(Exists(v, 5), 0.791618185737936934, 1e-14);
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(Forall(ones, 5), 1.0);
  EXPECT_DOUBLE_EQ(Exists(ones, 5), 1.0);
  const std::vector<double> mixed = {0.2, 0.6, 0.7, 0.1};
  EXPECT_NEAR(Forall(mixed, 1), 0.4, 1e-15);
  EXPECT_NEAR(Exists(mixed, 1), 0.4, 1e-15);
  EXPECT_THROW(Forall({}, 5), std::invalid_argument);
  EXPECT_THROW(Exists({}, 5), std::invalid_argument);
}

TEST(FuzzyTest, IntPowMatchesStd) {
  for (int q = 0; q <= 9; ++q)
    for (double x : {0.0, 0.3, 0.5, 0.99, 1.0}) EXPECT_NEAR(IntPow(x, q), std::pow(x, q), 1e-15);
}

TEST(FuzzyTest, ConfigValidation) {
  EXPECT_NO_THROW(FuzzyConfig{}.Validate());
  EXPECT_THROW((FuzzyConfig{0, 1e-7}.Validate()), std::invalid_argument);
  EXPECT_THROW((FuzzyConfig{5, 0.0}.Validate()), std::invalid_argument);
  EXPECT_THROW((FuzzyConfig{5, 1e-2}.Validate()), std::invalid_argument);
}

TEST(FuzzyTest, GeneralizedMeanPartialMatchesFiniteDifference) {
  std::vector<double> x = {0.3, 0.7, 0.1};
  for (int q : {1, 2, 5}) {
    const double m = GeneralizedMean(x, q);
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::vector<double> up = x, down = x;
      up[i] += 1e-6;
      down[i] -= 1e-6;
      const double fd = (GeneralizedMean(up, q) - GeneralizedMean(down, q)) / 2e-6;
      EXPECT_NEAR(GeneralizedMeanPartial(x[i], m, q, x.size(), 1e-7), fd, 1e-8);
    }
  }
}

TEST(FuzzyTest, QuantifierOrderInQ) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(2 + trial % 7);
    for (double& x : v) x = u(rng);
    for (int q = 1; q < 8; ++q) EXPECT_LE(Forall(v, q + 1), Forall(v, q) + 1e-15);
  }
}

}  // namespace
}  // namespace hierlogic::fuzzy
