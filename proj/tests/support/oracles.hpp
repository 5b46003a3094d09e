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

// Independent reference computations shared by the unit and acceptance
// tests: finite-difference gradients, brute-force metric tallies and the
// pairwise AUC.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dramnet/ops.hpp"
#include "dramnet/random.hpp"
#include "dramnet/tensor.hpp"

namespace dramnet::testing {

using nn::Shape;
using nn::Tensor;

inline Tensor<double> random_tensor(const Shape& shape, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Tensor<double> t(shape);
  const KeyedStream s(seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = lo + (hi - lo) * s.uniform(i);
  return t;
}

// Values bounded away from zero, for checks across the ReLU kink.
inline Tensor<double> random_off_zero(const Shape& shape, std::uint64_t seed, double gap = 0.05) {
  Tensor<double> t = random_tensor(shape, seed);
  for (auto& v : t.values()) v = v < 0 ? v - gap : v + gap;
  return t;
}

// Distinct values at least `spacing` apart, so no max-pool window is tied
// within a finite-difference step.
inline Tensor<double> random_distinct(const Shape& shape, std::uint64_t seed, double spacing = 0.01) {
  Tensor<double> t(shape);
  const auto perm = seeded_permutation(t.size(), seed);
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = (static_cast<double>(perm[i]) - t.size() / 2.0) * spacing;
  return t;
}

inline double dot(const Tensor<double>& a, const Tensor<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Central differences of the scalar f() with respect to every entry of x.
inline Tensor<double> numeric_gradient(const std::function<double()>& f, Tensor<double>& x, double h = 1e-5) {
  Tensor<double> g(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + h;
    const double up = f();
    x[i] = keep - h;
    const double down = f();
    x[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// max_i |a - n| / max(|a|, |n|, floor); the floor keeps exact zeros (dead
// ReLUs, non-max pool inputs) from dividing by round-off.
inline double max_relative_error(const Tensor<double>& analytic, const Tensor<double>& numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

struct GradReport {
  std::string kind;
  int trials = 0;
  double max_error = 0.0;
};

// Each check projects the layer output onto a fixed random tensor R, so the
// scalar is L = <y, R> and dL/dy = R.

inline GradReport check_conv(int trials, std::uint64_t seed = 11) {
  GradReport r{"conv", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const std::size_t k = std::array<std::size_t, 3>{1, 3, 5}[t % 3];
    const std::size_t stride = 1 + t % 2;
    const auto pad = t % 4 == 3 ? nn::Padding::Valid : nn::Padding::Same;
    const std::size_t h = 5 + t % 3, w = 6 + t % 2;
    auto x = random_tensor({2, h, w, 2}, derive_seed(s, {1}));
    auto wt = random_tensor({k, k, 2, 3}, derive_seed(s, {2}));
    auto b = random_tensor({3}, derive_seed(s, {3}));
    const auto y0 = nn::conv2d_forward(x, wt, b, stride, pad);
    const auto R = random_tensor(y0.shape(), derive_seed(s, {4}));
    const auto f = [&] { return dot(nn::conv2d_forward(x, wt, b, stride, pad), R); };
    const auto g = nn::conv2d_backward(x, wt, R, stride, pad);
    r.max_error = std::max({r.max_error, max_relative_error(g.input, numeric_gradient(f, x)),
                            max_relative_error(g.weights, numeric_gradient(f, wt)),
                            max_relative_error(g.bias, numeric_gradient(f, b))});
  }
  return r;
}

inline GradReport check_pool(int trials, std::uint64_t seed = 12) {
  GradReport r{"pool", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const std::size_t h = 4 + t % 3, w = 4 + (t / 3) % 3;
    const std::size_t stride = t % 4 == 1 ? 1 : 2;
    auto x = random_distinct({2, h, w, 3}, derive_seed(s, {1}));
    const auto p0 = nn::maxpool_forward(x, 2, 2, stride);
    const auto R = random_tensor(p0.output.shape(), derive_seed(s, {2}));
    const auto f = [&] { return dot(nn::maxpool_forward(x, 2, 2, stride).output, R); };
    const auto dx = nn::maxpool_backward(R, p0.argmax, x.shape());
    r.max_error = std::max(r.max_error, max_relative_error(dx, numeric_gradient(f, x)));
  }
  return r;
}

inline GradReport check_batchnorm(int trials, std::uint64_t seed = 13) {
  GradReport r{"batchnorm", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const Shape shape = t % 2 ? Shape{5, 4} : Shape{3, 2, 3, 4};
    auto x = random_tensor(shape, derive_seed(s, {1}), -2.0, 2.0);
    auto gamma = random_tensor({4}, derive_seed(s, {2}), 0.5, 1.5);
    auto beta = random_tensor({4}, derive_seed(s, {3}));
    const auto R = random_tensor(shape, derive_seed(s, {4}));
    nn::BatchNormCache<double> cache;
    const auto f = [&] {
      nn::BatchNormCache<double> c;
      return dot(nn::batchnorm_train(x, gamma, beta, c), R);
    };
    nn::batchnorm_train(x, gamma, beta, cache);
    const auto g = nn::batchnorm_backward(R, gamma, cache);
    r.max_error = std::max({r.max_error, max_relative_error(g.input, numeric_gradient(f, x)),
                            max_relative_error(g.gamma, numeric_gradient(f, gamma)),
                            max_relative_error(g.beta, numeric_gradient(f, beta))});
  }
  return r;
}

inline GradReport check_relu(int trials, std::uint64_t seed = 14) {
  GradReport r{"relu", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    auto x = random_off_zero({2, 3, 3, 2}, derive_seed(s, {1}));
    const auto R = random_tensor(x.shape(), derive_seed(s, {2}));
    const auto f = [&] { return dot(nn::relu_forward(x), R); };
    r.max_error = std::max(r.max_error, max_relative_error(nn::relu_backward(x, R), numeric_gradient(f, x)));
  }
  return r;
}

inline GradReport check_dropout(int trials, std::uint64_t seed = 15) {
  GradReport r{"dropout", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    auto x = random_tensor({4, 6}, derive_seed(s, {1}));
    const auto mask = nn::dropout_mask<double>(x.size(), 0.5, s, static_cast<std::uint64_t>(t));
    const auto R = random_tensor(x.shape(), derive_seed(s, {2}));
    const auto f = [&] { return dot(nn::apply_mask(x, std::span<const double>(mask)), R); };
    const auto dx = nn::apply_mask(R, std::span<const double>(mask));
    r.max_error = std::max(r.max_error, max_relative_error(dx, numeric_gradient(f, x)));
  }
  return r;
}

inline GradReport check_dense(int trials, std::uint64_t seed = 16) {
  GradReport r{"dense", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const Shape xs = t % 2 ? Shape{3, 5} : Shape{2, 2, 2, 3};
    auto x = random_tensor(xs, derive_seed(s, {1}));
    const std::size_t d = x.size() / x.dim(0);
    auto w = random_tensor({d, 4}, derive_seed(s, {2}));
    auto b = random_tensor({4}, derive_seed(s, {3}));
    const auto R = random_tensor({x.dim(0), 4}, derive_seed(s, {4}));
    const auto f = [&] { return dot(nn::dense_forward(x, w, b), R); };
    const auto g = nn::dense_backward(x, w, R);
    r.max_error = std::max({r.max_error, max_relative_error(g.input, numeric_gradient(f, x)),
                            max_relative_error(g.weights, numeric_gradient(f, w)),
                            max_relative_error(g.bias, numeric_gradient(f, b))});
  }
  return r;
}

// Softmax + cross-entropy at the logits, plus the L2 term at the weights.
inline GradReport check_softmax_loss(int trials, std::uint64_t seed = 17) {
  GradReport r{"softmax+loss", trials, 0.0};
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(t)});
    const std::size_t n = 2 + t % 4, k = 2 + t % 3;
    auto z = random_tensor({n, k}, derive_seed(s, {1}), -3.0, 3.0);
    std::vector<int> labels(n);
    const KeyedStream ls(derive_seed(s, {2}));
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(ls.below(k, i));
    const auto f = [&] { return nn::cross_entropy(nn::softmax(z), std::span<const int>(labels)); };
    const auto dz = nn::cross_entropy_grad(nn::softmax(z), std::span<const int>(labels));
    r.max_error = std::max(r.max_error, max_relative_error(dz, numeric_gradient(f, z)));

    auto w = random_tensor({3, 4}, derive_seed(s, {3}));
    const double lambda = 1e-2;
    const Tensor<double>* ws[] = {&w};
    const auto fw = [&] { return nn::l2_penalty<double>(ws, lambda); };
    Tensor<double> dw(w.shape());
    for (std::size_t i = 0; i < w.size(); ++i) dw[i] = 2.0 * lambda * w[i];
    r.max_error = std::max(r.max_error, max_relative_error(dw, numeric_gradient(fw, w)));
  }
  return r;
}

inline std::vector<GradReport> gradient_suite(int trials = 10) {
  return {check_conv(trials), check_pool(trials),    check_batchnorm(trials), check_relu(trials),
          check_dropout(trials), check_dense(trials), check_softmax_loss(trials)};
}

// --- metric oracles -----------------------------------------------------------

struct TallyMetrics {
  double accuracy = 0.0;
  std::vector<double> precision, recall, f1;
};

// Per-class counts straight from the (truth, predicted) pairs.
inline TallyMetrics tally(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred,
                          std::size_t n_classes) {
  TallyMetrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
  m.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
  for (std::size_t k = 0; k < n_classes; ++k) {
    double tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (pred[i] == k && truth[i] == k) tp += 1;
      if (pred[i] == k && truth[i] != k) fp += 1;
      if (pred[i] != k && truth[i] == k) fn += 1;
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double rc = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.precision.push_back(p);
    m.recall.push_back(rc);
    m.f1.push_back(p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0);
  }
  return m;
}

// P(score of a random positive > score of a random negative), ties 1/2.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& positive) {
  std::uint64_t twice = 0, pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) twice += 2;
      else if (scores[i] == scores[j]) twice += 1;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pairs));
}

}  // namespace dramnet::testing
