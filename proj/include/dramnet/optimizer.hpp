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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dramnet/errors.hpp"
#include "dramnet/layers.hpp"

namespace dramnet::train {

// Staircase decay: lr0 * rate^floor(step / period).
inline double lr_at(std::uint64_t step, double lr0, double decay_rate, std::uint64_t decay_period) {
  if (decay_period == 0) throw ParameterError("decay period must be >= 1");
  return lr0 * std::pow(decay_rate, static_cast<double>(step / decay_period));
}

// v <- momentum * v + g;  w <- w - lr * v, with g = grad + l2 * w.
template <typename T>
void sgd_momentum_step(std::span<T> params, std::span<const T> grads, std::span<T> velocity,
                       double lr, double momentum, double l2 = 0.0) {
  if (params.size() != grads.size() || params.size() != velocity.size())
    throw ShapeError("sgd: parameter, gradient and velocity sizes differ");
  T* __restrict w = params.data();
  const T* __restrict gr = grads.data();
  T* __restrict vel = velocity.data();
  const T m = static_cast<T>(momentum), rate = static_cast<T>(lr), k = static_cast<T>(l2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    vel[i] = m * vel[i] + (gr[i] + k * w[i]);
    w[i] -= rate * vel[i];
  }
}

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam; `t` is the 1-based step count after increment. The
// gradient is grad + l2 * w, so an L2 penalty costs no extra pass over memory.
template <typename T>
void adam_step(std::span<T> params, std::span<const T> grads, std::span<T> first, std::span<T> second,
               std::uint64_t t, double lr, const AdamHyper& h = {}, double l2 = 0.0) {
  if (params.size() != grads.size() || params.size() != first.size() || params.size() != second.size())
    throw ShapeError("adam: parameter, gradient and moment sizes differ");
  if (t == 0) throw ParameterError("adam step counter starts at 1");
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(t));
  const T b1 = static_cast<T>(h.beta1), b2 = static_cast<T>(h.beta2);
  const T rate = static_cast<T>(lr), k = static_cast<T>(l2);
  const T inv_c1 = static_cast<T>(1.0 / c1), inv_c2 = static_cast<T>(1.0 / c2);
  const T eps = static_cast<T>(h.epsilon);
  T* __restrict w = params.data();
  const T* __restrict gr = grads.data();
  T* __restrict m = first.data();
  T* __restrict v = second.data();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const T g = gr[i] + k * w[i];
    m[i] = b1 * m[i] + (T{1} - b1) * g;
    v[i] = b2 * v[i] + (T{1} - b2) * g * g;
    w[i] -= rate * (m[i] * inv_c1) / (std::sqrt(v[i] * inv_c2) + eps);
  }
}

enum class OptimizerKind { SgdMomentum, Adam };

inline std::string_view optimizer_name(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

inline OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "sgd" || s == "sgd_momentum") return OptimizerKind::SgdMomentum;
  throw ParameterError("unknown optimizer '" + std::string(s) + "'");
}

// Per-parameter accumulators mirroring a model's trainable tensors.
template <typename T>
struct OptimizerState {
  std::vector<std::vector<T>> first;   // velocity (SGD) or first moment (Adam)
  std::vector<std::vector<T>> second;  // Adam second moment
  std::uint64_t t = 0;
};

template <typename T>
class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double momentum, AdamHyper adam) : kind_(kind), momentum_(momentum), adam_(adam) {}

  // `lambda` adds the 2 * lambda * w penalty gradient to decayed parameters.
  void step(const std::vector<nn::Param<T>*>& params, double lr, double lambda = 0.0) {
    if (state_.first.empty()) {
      for (const auto* p : params) {
        state_.first.emplace_back(p->value.size(), T{0});
        if (kind_ == OptimizerKind::Adam) state_.second.emplace_back(p->value.size(), T{0});
      }
    }
    if (state_.first.size() != params.size()) throw ShapeError("optimizer state does not match parameters");
    ++state_.t;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto* p = params[i];
      if (p->grad.size() != p->value.size()) throw ShapeError("missing gradient for a parameter");
      const double l2 = p->decay ? 2.0 * lambda : 0.0;
      if (kind_ == OptimizerKind::Adam) {
        adam_step<T>(p->value.values(), p->grad.values(), state_.first[i], state_.second[i], state_.t, lr, adam_, l2);
      } else {
        sgd_momentum_step<T>(p->value.values(), p->grad.values(), state_.first[i], lr, momentum_, l2);
      }
    }
  }

  const OptimizerState<T>& state() const { return state_; }

 private:
  OptimizerKind kind_;
  double momentum_;
  AdamHyper adam_;
  OptimizerState<T> state_;
};

// Adds the L2 penalty gradient 2 * lambda * w to every decayed parameter.
template <typename T>
void add_l2_gradient(const std::vector<nn::Param<T>*>& params, double lambda) {
  if (lambda == 0.0) return;
  const T k = static_cast<T>(2.0 * lambda);
  for (auto* p : params) {
    if (!p->decay) continue;
    for (std::size_t i = 0; i < p->value.size(); ++i) p->grad[i] += k * p->value[i];
  }
}

}  // namespace dramnet::train
