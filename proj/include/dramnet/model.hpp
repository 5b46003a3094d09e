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
#include <type_traits>
#include <variant>
#include <vector>

#include "dramnet/architecture.hpp"
#include "dramnet/layers.hpp"
#include "dramnet/random.hpp"

namespace dramnet::nn {

// The classifier layer (the Full layer feeding the softmax) starts with
// He-uniform weights scaled down by this factor so a fresh network predicts
// close to uniform class probabilities.
inline constexpr double kClassifierInitScale = 0.01;

template <typename T>
class Model {
 public:
  using scalar_type = T;

  Model() = default;

  // Conv/dense weights He-uniform from a keyed stream, biases 0, gamma 1,
  // beta 0, running statistics (0, 1).
  static Model build(const ArchitectureSpec& arch, std::uint64_t init_seed) {
    const ShapeTable shapes = infer_shapes(arch);
    Model m;
    m.arch_ = arch;
    m.init_seed_ = init_seed;
    bool first_weighted = true;
    std::uint64_t dropout_key = 0;
    for (const ShapeRow& r : shapes.layers) {
      const LayerSpec& l = r.spec;
      const bool classifier = r.index + 2 == arch.layers.size();
      switch (l.kind) {
        case LayerKind::Conv2D: {
          Conv2DLayer<T> c;
          c.stride = l.stride;
          c.weights = {Tensor<T>({l.kernel_h, l.kernel_w, r.input.c, l.units}), {}, true};
          c.bias = {Tensor<T>({l.units}), {}, false};
          he_uniform(c.weights.value, l.kernel_h * l.kernel_w * r.input.c, init_seed, r.index, 1.0);
          c.need_input_grad = !first_weighted;
          first_weighted = false;
          m.layers_.emplace_back(std::move(c));
          break;
        }
        case LayerKind::Pool: {
          PoolLayer<T> p;
          p.kernel_h = l.kernel_h;
          p.kernel_w = l.kernel_w;
          p.stride = l.stride;
          m.layers_.emplace_back(std::move(p));
          break;
        }
        case LayerKind::BatchNorm: {
          BatchNormLayer<T> b;
          b.gamma = {Tensor<T>({r.input.c}, T{1}), {}, false};
          b.beta = {Tensor<T>({r.input.c}), {}, false};
          b.running_mean = Tensor<T>({r.input.c});
          b.running_var = Tensor<T>({r.input.c}, T{1});
          m.layers_.emplace_back(std::move(b));
          break;
        }
        case LayerKind::ReLU:
          m.layers_.emplace_back(ReluLayer<T>{});
          break;
        case LayerKind::Dropout: {
          DropoutLayer<T> d;
          d.p = l.dropout_p;
          d.key = dropout_key++;
          m.layers_.emplace_back(std::move(d));
          break;
        }
        case LayerKind::Full: {
          DenseLayer<T> d;
          d.weights = {Tensor<T>({r.input.flat(), l.units}), {}, true};
          d.bias = {Tensor<T>({l.units}), {}, false};
          he_uniform(d.weights.value, r.input.flat(), init_seed, r.index,
                     classifier ? kClassifierInitScale : 1.0);
          d.need_input_grad = !first_weighted;
          first_weighted = false;
          m.layers_.emplace_back(std::move(d));
          break;
        }
        case LayerKind::Softmax:
          m.layers_.emplace_back(SoftmaxLayer<T>{});
          break;
      }
    }
    return m;
  }

  const ArchitectureSpec& architecture() const { return arch_; }
  std::uint64_t init_seed() const { return init_seed_; }
  std::size_t n_classes() const { return arch_.n_classes; }
  std::vector<Layer<T>>& layers() { return layers_; }
  const std::vector<Layer<T>>& layers() const { return layers_; }

  // Runs every layer except the terminal softmax.
  Tensor<T> logits(const Tensor<T>& x, const PassContext& ctx) {
    check_input(x);
    Tensor<T> h = x;
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
      h = std::visit([&](auto& layer) { return layer.forward(h, ctx); }, layers_[i]);
    }
    return h;
  }

  Tensor<T> predict(const Tensor<T>& x) { return softmax(logits(x, {Mode::Infer, 0, 0})); }

  // Backpropagates d loss / d logits; fills every Param::grad.
  void backward(const Tensor<T>& dlogits) {
    Tensor<T> g = dlogits;
    for (std::size_t i = layers_.size() - 1; i-- > 0;) {
      g = std::visit([&](auto& layer) { return layer.backward(g); }, layers_[i]);
      if (g.empty()) break;
    }
  }

  // Trainable parameters in layer order.
  std::vector<Param<T>*> parameters() {
    std::vector<Param<T>*> out;
    for (auto& layer : layers_) {
      std::visit(
          [&](auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, Conv2DLayer<T>> || std::is_same_v<L, DenseLayer<T>>) {
              out.push_back(&l.weights);
              out.push_back(&l.bias);
            } else if constexpr (std::is_same_v<L, BatchNormLayer<T>>) {
              out.push_back(&l.gamma);
              out.push_back(&l.beta);
            }
          },
          layer);
    }
    return out;
  }

  // Conv and dense weight tensors: the L2-penalized set.
  std::vector<const Tensor<T>*> decayed_weights() const {
    std::vector<const Tensor<T>*> out;
    for (const auto& layer : layers_) {
      std::visit(
          [&](const auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, Conv2DLayer<T>> || std::is_same_v<L, DenseLayer<T>>)
              out.push_back(&l.weights.value);
          },
          layer);
    }
    return out;
  }

  // Every persisted array in serialization order: conv/dense (weights,
  // bias), batchnorm (gamma, beta, running mean, running variance).
  std::vector<Tensor<T>*> stored_arrays() {
    std::vector<Tensor<T>*> out;
    for (auto& layer : layers_) {
      std::visit(
          [&](auto& l) {
            using L = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<L, Conv2DLayer<T>> || std::is_same_v<L, DenseLayer<T>>) {
              out.push_back(&l.weights.value);
              out.push_back(&l.bias.value);
            } else if constexpr (std::is_same_v<L, BatchNormLayer<T>>) {
              out.push_back(&l.gamma.value);
              out.push_back(&l.beta.value);
              out.push_back(&l.running_mean);
              out.push_back(&l.running_var);
            }
          },
          layer);
    }
    return out;
  }

  std::vector<const Tensor<T>*> stored_arrays() const {
    auto arrays = const_cast<Model*>(this)->stored_arrays();
    return {arrays.begin(), arrays.end()};
  }

  std::uint64_t stored_value_count() const {
    std::uint64_t n = 0;
    for (const Tensor<T>* t : stored_arrays()) n += t->size();
    return n;
  }

  template <typename U>
  Model<U> cast() const {
    Model<U> out = Model<U>::build(arch_, init_seed_);
    auto dst = out.stored_arrays();
    auto src = stored_arrays();
    for (std::size_t i = 0; i < src.size(); ++i) *dst[i] = src[i]->template cast<U>();
    return out;
  }

  // Compares persisted state only (not activation caches).
  bool same_parameters(const Model& other) const {
    if (!(arch_ == other.arch_) || init_seed_ != other.init_seed_) return false;
    auto a = stored_arrays();
    auto b = other.stored_arrays();
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!(*a[i] == *b[i])) return false;
    return true;
  }

 private:
  void check_input(const Tensor<T>& x) const {
    if (x.rank() != 4 || x.dim(1) != arch_.input.h || x.dim(2) != arch_.input.w || x.dim(3) != arch_.input.c)
      throw ShapeError("model " + arch_.name + " expects input (N, " + std::to_string(arch_.input.h) + ", " +
                       std::to_string(arch_.input.w) + ", " + std::to_string(arch_.input.c) + "), got " +
                       shape_string(x.shape()));
  }

  static void he_uniform(Tensor<T>& w, std::size_t fan_in, std::uint64_t seed, std::size_t layer_index,
                         double scale) {
    const double limit = scale * std::sqrt(6.0 / static_cast<double>(fan_in));
    const KeyedStream stream(derive_seed(seed, {0x1417, layer_index}));
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<T>((2.0 * stream.uniform(i) - 1.0) * limit);
  }

  ArchitectureSpec arch_;
  std::uint64_t init_seed_ = 0;
  std::vector<Layer<T>> layers_;
};

template <typename T>
Model<T> build_model(const ArchitectureSpec& arch, std::uint64_t init_seed) {
  return Model<T>::build(arch, init_seed);
}

}  // namespace dramnet::nn
