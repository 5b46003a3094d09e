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

// Counter-based random numbers. Every draw is a pure function of
// (key, counter), so results never depend on evaluation order or on how
// work is split across threads.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <vector>

namespace dramnet {

// Philox4x32-10 block function (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// SplitMix64 finalizer; used to fold several integers into one key.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t base,
                                    std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

// A keyed stream of Philox blocks addressed by (index, lane, attempt).
class KeyedStream {
 public:
  constexpr explicit KeyedStream(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr std::array<std::uint32_t, 4> block(std::uint64_t index,
                                               std::uint32_t lane = 0,
                                               std::uint32_t attempt = 0) const {
    return Philox4x32::generate({static_cast<std::uint32_t>(index),
                                 static_cast<std::uint32_t>(index >> 32), lane,
                                 attempt},
                                key_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform(std::uint64_t index, std::uint32_t lane = 0,
                 std::uint32_t attempt = 0) const {
    return to_unit(block(index, lane, attempt), 0);
  }

  // Standard normal via Box-Muller on the two halves of one block.
  double normal(std::uint64_t index, std::uint32_t lane = 0,
                std::uint32_t attempt = 0) const {
    const auto b = block(index, lane, attempt);
    const double u1 = 1.0 - to_unit(b, 0);  // (0, 1]
    const double u2 = to_unit(b, 2);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Natural log of a Gamma(shape, 1) draw. Marsaglia-Tsang; shapes below one
  // use the Gamma(shape + 1) * U^(1/shape) boost, kept in log space because
  // U^(1/shape) underflows for small shapes.
  double log_gamma(std::uint64_t index, std::uint32_t lane, double shape) const {
    const bool boost = shape < 1.0;
    const double a = boost ? shape + 1.0 : shape;
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (std::uint32_t attempt = 0;; ++attempt) {
      const auto b = block(index, lane, attempt);
      const double u1 = 1.0 - to_unit(b, 0);
      const double u2 = to_unit(b, 2);
      const double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      const double t = 1.0 + c * x;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double u = 1.0 - uniform(index, lane | 0x80000000u, attempt);
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        double log_g = std::log(d * v);
        if (boost) {
          const double ub = 1.0 - uniform(index, lane | 0x40000000u, attempt);
          log_g += std::log(ub) / shape;
        }
        return log_g;
      }
    }
  }

  // Beta(alpha, beta) through two gamma draws; exact 0 or 1 is possible when
  // the log-gamma gap exceeds double range.
  double beta(std::uint64_t index, std::uint32_t lane, double alpha, double beta_) const {
    const double lx = log_gamma(index, lane, alpha);
    const double ly = log_gamma(index, lane + 1, beta_);
    return 1.0 / (1.0 + std::exp(ly - lx));
  }

  // Unbiased integer in [0, bound) by rejection on 64-bit draws.
  std::uint64_t below(std::uint64_t bound, std::uint64_t index, std::uint32_t lane = 0) const {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0}) - (~std::uint64_t{0}) % bound;
    for (std::uint32_t attempt = 0;; ++attempt) {
      const auto b = block(index, lane, attempt);
      const std::uint64_t r = (std::uint64_t{b[0]} << 32) | b[1];
      if (r < limit) return r % bound;
    }
  }

 private:
  static double to_unit(const std::array<std::uint32_t, 4>& b, int first) {
    const std::uint64_t r = (std::uint64_t{b[first]} << 32) | b[first + 1];
    return static_cast<double>(r >> 11) * 0x1.0p-53;
  }

  std::array<std::uint32_t, 2> key_;
};

// Deterministic Fisher-Yates permutation of [0, n).
inline std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  const KeyedStream stream(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = stream.below(i, i - 1);
    std::swap(perm[i - 1], perm[j]);
  }
  return perm;
}

template <typename T>
void seeded_shuffle(std::span<T> items, std::uint64_t seed) {
  const KeyedStream stream(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = stream.below(i, i - 1);
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace dramnet
