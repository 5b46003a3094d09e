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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dramnet/random.hpp"

namespace dramnet {
namespace {

using Block = Philox4x32::Counter;

// Known-answer vectors distributed with the reference implementation.
TEST(Philox, KnownAnswerZero) {
  EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}),
            (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const std::uint32_t f = 0xffffffffu;
  EXPECT_EQ(Philox4x32::generate({f, f, f, f}, {f, f}),
            (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
  EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(KeyedStream, SameIndexSameValue) {
  const KeyedStream a(42), b(42), c(43);
  EXPECT_EQ(a.uniform(1000), b.uniform(1000));
  EXPECT_NE(a.uniform(1000), c.uniform(1000));
  EXPECT_NE(a.uniform(1000), a.uniform(1001));
  EXPECT_NE(a.uniform(5, 0), a.uniform(5, 1));
}

TEST(KeyedStream, UniformMoments) {
  const KeyedStream s(9);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sq += u * u;
  }
  // 5 sigma: sd(mean) = sqrt(1/12 / n)
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sq / n, 1.0 / 3, 0.003);
}

TEST(KeyedStream, NormalMoments) {
  const KeyedStream s(10);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s.normal(i);
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 5 / std::sqrt(n));
  EXPECT_NEAR(sq / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(KeyedStream, BetaMeanAndVariance) {
  // Beta(a, b): mean a / (a + b), variance ab / ((a + b)^2 (a + b + 1)).
  const KeyedStream s(11);
  const int n = 100000;
  for (auto [a, b] : {std::pair{2.0, 5.0}, std::pair{0.5, 0.5}, std::pair{0.05, 0.05}}) {
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const double x = s.beta(i, 0, a, b);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
      sum += x;
      sq += x * x;
    }
    const double mean = a / (a + b);
    const double var = a * b / ((a + b) * (a + b) * (a + b + 1));
    EXPECT_NEAR(sum / n, mean, 5 * std::sqrt(var / n)) << a << "," << b;
    EXPECT_NEAR(sq / n - (sum / n) * (sum / n), var, 0.05 * var) << a << "," << b;
  }
}

TEST(KeyedStream, BelowIsInRangeAndCoversIt) {
  const KeyedStream s(12);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) ++hits[s.below(7, i)];
  for (int h : hits) EXPECT_GT(h, 850);
}

TEST(DeriveSeed, SensitiveToEveryPart) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(2, {2, 3}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(1, {2, 0}));
}

TEST(SeededPermutation, IsAPermutationAndDeterministic) {
  const auto p = seeded_permutation(100, 5);
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> iota(100);
  std::iota(iota.begin(), iota.end(), 0);
  EXPECT_EQ(sorted, iota);
  EXPECT_EQ(p, seeded_permutation(100, 5));
  EXPECT_NE(p, seeded_permutation(100, 6));
  EXPECT_NE(p, iota);
}

TEST(SeededShuffle, MatchesPermutation) {
  std::vector<int> v(20);
  std::iota(v.begin(), v.end(), 0);
  auto w = v;
  seeded_shuffle(std::span<int>(w), 3);
  const auto p = seeded_permutation(20, 3);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(w[i], v[p[i]]);
}

}  // namespace
}  // namespace dramnet
