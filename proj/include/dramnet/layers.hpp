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

// Stateful layer wrappers around the primitives in ops.hpp. Each layer keeps
// what its gradient pass needs from the most recent forward pass.

#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "dramnet/errors.hpp"
#include "dramnet/ops.hpp"
#include "dramnet/tensor.hpp"

namespace dramnet::nn {

enum class Mode { Train, Infer };

struct PassContext {
  Mode mode = Mode::Infer;
  std::uint64_t seed = 0;  // dropout key
  std::uint64_t step = 0;  // dropout counter
};

template <typename T>
struct Param {
  Tensor<T> value;
  Tensor<T> grad;
  bool decay = false;  // included in the L2 penalty
};

template <typename T>
struct Conv2DLayer {
  Param<T> weights;
  Param<T> bias;
  std::size_t stride = 1;
  bool need_input_grad = true;
  Shape input_shape;
  RowMatrix<T> col;

  Tensor<T> forward(const Tensor<T>& x, const PassContext&) {
    input_shape = x.shape();
    return conv2d_forward(x, weights.value, bias.value, stride, Padding::Same, col);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    ConvGradients<T> g{Tensor<T>(), std::move(weights.grad), std::move(bias.grad)};
    conv2d_backward_into(input_shape, weights.value, dy, stride, Padding::Same, col, g, need_input_grad);
    weights.grad = std::move(g.weights);
    bias.grad = std::move(g.bias);
    return std::move(g.input);
  }
};

template <typename T>
struct PoolLayer {
  std::size_t kernel_h = 2, kernel_w = 2, stride = 2;
  Shape input_shape;
  std::vector<std::size_t> argmax;

  Tensor<T> forward(const Tensor<T>& x, const PassContext&) {
    input_shape = x.shape();
    auto r = maxpool_forward(x, kernel_h, kernel_w, stride);
    argmax = std::move(r.argmax);
    return std::move(r.output);
  }

  Tensor<T> backward(const Tensor<T>& dy) { return maxpool_backward(dy, argmax, input_shape); }
};

template <typename T>
struct BatchNormLayer {
  Param<T> gamma;
  Param<T> beta;
  Tensor<T> running_mean;
  Tensor<T> running_var;
  BatchNormCache<T> cache;
  bool trained_pass = false;

  Tensor<T> forward(const Tensor<T>& x, const PassContext& ctx) {
    trained_pass = ctx.mode == Mode::Train;
    if (trained_pass) return batchnorm_train(x, gamma.value, beta.value, cache, &running_mean, &running_var);
    return batchnorm_infer(x, gamma.value, beta.value, running_mean, running_var);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (!trained_pass) throw ContractError("batchnorm gradient requires a training-mode forward pass");
    auto g = batchnorm_backward(dy, gamma.value, cache);
    gamma.grad = std::move(g.gamma);
    beta.grad = std::move(g.beta);
    return std::move(g.input);
  }
};

template <typename T>
struct ReluLayer {
  Tensor<T> input;

  Tensor<T> forward(const Tensor<T>& x, const PassContext&) {
    input = x;
    return relu_forward(x);
  }

  Tensor<T> backward(const Tensor<T>& dy) { return relu_backward(input, dy); }
};

template <typename T>
struct DropoutLayer {
  double p = 0.5;
  std::uint64_t key = 0;   // distinguishes dropout layers within one model
  std::vector<T> mask;     // empty after an inference pass

  Tensor<T> forward(const Tensor<T>& x, const PassContext& ctx) {
    if (ctx.mode == Mode::Infer || p == 0.0) {
      mask.clear();
      return x;
    }
    mask = dropout_mask<T>(x.size(), p, derive_seed(ctx.seed, {key}), ctx.step);
    return apply_mask(x, std::span<const T>(mask));
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    if (mask.empty()) return dy;
    return apply_mask(dy, std::span<const T>(mask));
  }
};

template <typename T>
struct DenseLayer {
  Param<T> weights;
  Param<T> bias;
  bool need_input_grad = true;
  Tensor<T> input;

  Tensor<T> forward(const Tensor<T>& x, const PassContext&) {
    input = x;
    return dense_forward(x, weights.value, bias.value);
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    DenseGradients<T> g{Tensor<T>(), std::move(weights.grad), std::move(bias.grad)};
    dense_backward_into(input, weights.value, dy, g, need_input_grad);
    weights.grad = std::move(g.weights);
    bias.grad = std::move(g.bias);
    return std::move(g.input);
  }
};

// Terminal softmax; the model differentiates the loss at the logits, so this
// layer is skipped on the gradient path.
template <typename T>
struct SoftmaxLayer {
  Tensor<T> forward(const Tensor<T>& x, const PassContext&) { return softmax(x); }
  Tensor<T> backward(const Tensor<T>& dy) { return dy; }
};

template <typename T>
using Layer = std::variant<Conv2DLayer<T>, PoolLayer<T>, BatchNormLayer<T>, ReluLayer<T>,
                           DropoutLayer<T>, DenseLayer<T>, SoftmaxLayer<T>>;

}  // namespace dramnet::nn
