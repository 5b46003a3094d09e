/*
 * Copyright 2026 The dramnet Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dramnet/optimizer.hpp"

namespace dramnet::train {
namespace {

TEST(LearningRate, Staircase) {
  EXPECT_DOUBLE_EQ(lr_at(0, 0.01, 0.9, 500), 0.01);
  EXPECT_DOUBLE_EQ(lr_at(499, 0.01, 0.9, 500), 0.01);
  EXPECT_DOUBLE_EQ(lr_at(500, 0.01, 0.9, 500), 0.01 * 0.9);
  EXPECT_DOUBLE_EQ(lr_at(1499, 0.01, 0.9, 500), 0.01 * 0.81);
  EXPECT_THROW(lr_at(1, 0.01, 0.9, 0), ParameterError);
}

TEST(Sgd, TwoHandComputedSteps) {
  std::vector<double> w{1.0, -2.0}, v{0.0, 0.0};
  const std::vector<double> g1{0.5, 1.0}, g2{-1.0, 0.25};
  sgd_momentum_step<double>(w, g1, v, 0.1, 0.9);
  EXPECT_DOUBLE_EQ(w[0], 0.95);
  EXPECT_DOUBLE_EQ(w[1], -2.1);
  sgd_momentum_step<double>(w, g2, v, 0.1, 0.9);
  // v = 0.9 * 0.5 - 1.0 = -0.55 ; v = 0.9 * 1.0 + 0.25 = 1.15
  EXPECT_NEAR(w[0], 0.95 + 0.055, 1e-15);
  EXPECT_NEAR(w[1], -2.1 - 0.115, 1e-15);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> w{1.0, 1.0}, m(2, 0.0), v(2, 0.0);
  const std::vector<double> g{0.5, -3.0};
  adam_step<double>(w, g, m, v, 1, 0.1);
  // bias-corrected m / sqrt(v) = sign(g) on the first step
  EXPECT_NEAR(w[0], 0.9, 1e-8);
  EXPECT_NEAR(w[1], 1.1, 1e-8);
  EXPECT_NEAR(m[0], 0.05, 1e-15);
  EXPECT_NEAR(v[1], 0.009, 1e-15);
}

TEST(Adam, SecondStepHandComputed) {
  std::vector<double> w{0.0}, m{0.0}, v{0.0};
  const std::vector<double> g1{1.0}, g2{0.5};
  adam_step<double>(w, g1, m, v, 1, 0.01);
  adam_step<double>(w, g2, m, v, 2, 0.01);
  const double m2 = 0.9 * 0.1 + 0.1 * 0.5;
  const double v2 = 0.999 * 0.001 + 0.001 * 0.25;
  const double step2 = 0.01 * (m2 / (1 - 0.81)) / (std::sqrt(v2 / (1 - 0.998001)) + 1e-8);
  const double step1 = 0.01 * 1.0 / (1.0 + 1e-8);
  EXPECT_NEAR(w[0], -step1 - step2, 1e-15);
}

TEST(Adam, StepCounterStartsAtOne) {
  std::vector<double> w{0.0}, m{0.0}, v{0.0};
  const std::vector<double> g{1.0};
  EXPECT_THROW(adam_step<double>(w, g, m, v, 0, 0.01), ParameterError);
}

TEST(Optimizer, FusedL2MatchesExplicitGradient) {
  for (auto kind : {OptimizerKind::Adam, OptimizerKind::SgdMomentum}) {
    nn::Param<double> a, b, c, d;
    a.value = nn::Tensor<double>({3}, std::vector<double>{0.5, -1.0, 2.0});
    a.grad = nn::Tensor<double>({3}, std::vector<double>{0.1, 0.2, -0.3});
    a.decay = true;
    c.value = nn::Tensor<double>({1}, std::vector<double>{4.0});
    c.grad = nn::Tensor<double>({1}, std::vector<double>{1.0});
    c.decay = false;
    b = a;
    d = c;
    Optimizer<double> fused(kind, 0.9, {}), explicit_l2(kind, 0.9, {});
    for (int step = 0; step < 3; ++step) {
      fused.step({&a, &c}, 0.01, 1e-2);
      add_l2_gradient<double>({&b, &d}, 1e-2);
      explicit_l2.step({&b, &d}, 0.01);
      b.grad = nn::Tensor<double>({3}, std::vector<double>{0.1, 0.2, -0.3});
    }
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a.value[i], b.value[i], 1e-15);
    EXPECT_EQ(c.value[0], d.value[0]);
  }
}

TEST(Optimizer, ParseNames) {
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::Adam);
  EXPECT_EQ(parse_optimizer("sgd"), OptimizerKind::SgdMomentum);
  EXPECT_THROW(parse_optimizer("rmsprop"), ParameterError);
}

}  // namespace
}  // namespace dramnet::train
