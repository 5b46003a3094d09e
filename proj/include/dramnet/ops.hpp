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

// Forward and gradient passes of the network primitives. All image tensors
// are NHWC; convolution weights are (kh, kw, in_channels, out_channels) and
// dense weights are (in_features, out_units).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "dramnet/errors.hpp"
#include "dramnet/random.hpp"
#include "dramnet/tensor.hpp"

namespace dramnet::nn {

// --- convolution -----------------------------------------------------------

enum class Padding { Same, Valid };

struct ConvGeometry {
  std::size_t batch = 0, in_h = 0, in_w = 0, in_c = 0;
  std::size_t kh = 0, kw = 0, stride = 1;
  std::size_t out_h = 0, out_w = 0;
  std::size_t pad_top = 0, pad_left = 0;

  std::size_t rows() const { return batch * out_h * out_w; }
  std::size_t patch() const { return kh * kw * in_c; }
};

// Output extent along one axis; "same" follows the usual
// out = ceil(in / stride) rule with the extra padding placed after.
inline std::size_t conv_out_extent(std::size_t in, std::size_t k, std::size_t stride, Padding p,
                                   std::size_t* pad_before = nullptr) {
  if (stride == 0) throw ShapeError("stride must be >= 1");
  if (p == Padding::Same) {
    const std::size_t out = (in + stride - 1) / stride;
    const std::size_t needed = (out - 1) * stride + k;
    const std::size_t total = needed > in ? needed - in : 0;
    if (pad_before) *pad_before = total / 2;
    return out;
  }
  if (pad_before) *pad_before = 0;
  return in >= k ? (in - k) / stride + 1 : 0;
}

inline ConvGeometry conv_geometry(const Shape& input, const Shape& weights, std::size_t stride,
                                  Padding padding) {
  if (input.size() != 4) throw ShapeError("conv2d expects NHWC input, got " + shape_string(input));
  if (weights.size() != 4) throw ShapeError("conv2d weights must be (kh, kw, cin, cout)");
  if (input[3] != weights[2])
    throw ShapeError("conv2d channel mismatch: input has " + std::to_string(input[3]) +
                     ", weights expect " + std::to_string(weights[2]));
  ConvGeometry g;
  g.batch = input[0];
  g.in_h = input[1];
  g.in_w = input[2];
  g.in_c = input[3];
  g.kh = weights[0];
  g.kw = weights[1];
  g.stride = stride;
  g.out_h = conv_out_extent(g.in_h, g.kh, stride, padding, &g.pad_top);
  g.out_w = conv_out_extent(g.in_w, g.kw, stride, padding, &g.pad_left);
  if (g.out_h == 0 || g.out_w == 0) throw ShapeError("conv2d output would be empty");
  return g;
}

// Unfolds every receptive field into one row of `col` (rows() x patch()).
template <typename T>
void im2col(const Tensor<T>& x, const ConvGeometry& g, RowMatrix<T>& col) {
  col.resize(static_cast<Eigen::Index>(g.rows()), static_cast<Eigen::Index>(g.patch()));
  const std::size_t patch = g.patch();
  const auto rows = static_cast<std::int64_t>(g.rows());
#pragma omp parallel for schedule(static)
  for (std::int64_t row = 0; row < rows; ++row) {
    const std::size_t ox = static_cast<std::size_t>(row) % g.out_w;
    const std::size_t oy = (static_cast<std::size_t>(row) / g.out_w) % g.out_h;
    const std::size_t n = static_cast<std::size_t>(row) / (g.out_w * g.out_h);
    T* dst = col.data() + static_cast<std::size_t>(row) * patch;
    for (std::size_t ky = 0; ky < g.kh; ++ky) {
      const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad_top);
      for (std::size_t kx = 0; kx < g.kw; ++kx) {
        const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad_left);
        T* d = dst + (ky * g.kw + kx) * g.in_c;
        if (iy < 0 || ix < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h) ||
            ix >= static_cast<std::ptrdiff_t>(g.in_w)) {
          std::fill_n(d, g.in_c, T{0});
        } else {
          const T* s = x.data() + ((n * g.in_h + static_cast<std::size_t>(iy)) * g.in_w +
                                   static_cast<std::size_t>(ix)) * g.in_c;
          std::copy_n(s, g.in_c, d);
        }
      }
    }
  }
}

// Adjoint of im2col: scatters patch rows back onto the input grid.
template <typename T>
Tensor<T> col2im(const RowMatrix<T>& col, const ConvGeometry& g) {
  Tensor<T> dx({g.batch, g.in_h, g.in_w, g.in_c});
  const std::size_t patch = g.patch();
  const auto batch = static_cast<std::int64_t>(g.batch);
  // One sample per iteration so writes never overlap across threads.
#pragma omp parallel for schedule(static)
  for (std::int64_t ni = 0; ni < batch; ++ni) {
    const auto n = static_cast<std::size_t>(ni);
    for (std::size_t oy = 0; oy < g.out_h; ++oy) {
      for (std::size_t ox = 0; ox < g.out_w; ++ox) {
        const T* src = col.data() + ((n * g.out_h + oy) * g.out_w + ox) * patch;
        for (std::size_t ky = 0; ky < g.kh; ++ky) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - static_cast<std::ptrdiff_t>(g.pad_top);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.in_h)) continue;
          for (std::size_t kx = 0; kx < g.kw; ++kx) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - static_cast<std::ptrdiff_t>(g.pad_left);
            if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.in_w)) continue;
            T* d = dx.data() + ((n * g.in_h + static_cast<std::size_t>(iy)) * g.in_w +
                                static_cast<std::size_t>(ix)) * g.in_c;
            const T* s = src + (ky * g.kw + kx) * g.in_c;
            for (std::size_t c = 0; c < g.in_c; ++c) d[c] += s[c];
          }
        }
      }
    }
  }
  return dx;
}

// Cross-correlation (no kernel flip). `col` receives the unfolded input for
// reuse by the gradient pass.
template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                         std::size_t stride, Padding padding, RowMatrix<T>& col) {
  const ConvGeometry g = conv_geometry(x.shape(), w.shape(), stride, padding);
  const std::size_t cout = w.dim(3);
  if (b.size() != cout) throw ShapeError("conv2d bias length must equal output channels");
  im2col(x, g, col);
  Tensor<T> y({g.batch, g.out_h, g.out_w, cout});
  auto ym = as_matrix(y, g.rows());
  ym.noalias() = col * as_matrix(w, g.patch());
  ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b.data(), static_cast<Eigen::Index>(cout));
  return y;
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b,
                         std::size_t stride = 1, Padding padding = Padding::Same) {
  RowMatrix<T> col;
  return conv2d_forward(x, w, b, stride, padding, col);
}

template <typename T>
struct ConvGradients {
  Tensor<T> input;  // empty when not requested
  Tensor<T> weights;
  Tensor<T> bias;
};

template <typename T>
void conv2d_backward_into(const Shape& input_shape, const Tensor<T>& w, const Tensor<T>& dy, std::size_t stride,
                          Padding padding, const RowMatrix<T>& col, ConvGradients<T>& grads,
                          bool need_input = true) {
  const ConvGeometry g = conv_geometry(input_shape, w.shape(), stride, padding);
  const std::size_t cout = w.dim(3);
  if (dy.size() != g.rows() * cout) throw ShapeError("conv2d output gradient has wrong size");
  const auto dym = as_matrix(dy, g.rows());
  ensure_shape(grads.weights, w.shape());
  as_matrix(grads.weights, g.patch()).noalias() = col.transpose() * dym;
  ensure_shape(grads.bias, {cout});
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(grads.bias.data(), static_cast<Eigen::Index>(cout)) =
      dym.colwise().sum();
  if (need_input) {
    RowMatrix<T> dcol = dym * as_matrix(w, g.patch()).transpose();
    grads.input = col2im(dcol, g);
  } else {
    grads.input = Tensor<T>();
  }
}

template <typename T>
ConvGradients<T> conv2d_backward_cached(const Shape& input_shape, const Tensor<T>& w,
                                        const Tensor<T>& dy, std::size_t stride, Padding padding,
                                        const RowMatrix<T>& col, bool need_input = true) {
  ConvGradients<T> grads;
  conv2d_backward_into(input_shape, w, dy, stride, padding, col, grads, need_input);
  return grads;
}

template <typename T>
ConvGradients<T> conv2d_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                                 std::size_t stride = 1, Padding padding = Padding::Same) {
  const ConvGeometry g = conv_geometry(x.shape(), w.shape(), stride, padding);
  RowMatrix<T> col;
  im2col(x, g, col);
  return conv2d_backward_cached(x.shape(), w, dy, stride, padding, col, true);
}

// --- max pooling -----------------------------------------------------------

inline std::size_t pool_out_extent(std::size_t in, std::size_t k, std::size_t stride) {
  if (stride == 0) throw ShapeError("pool stride must be >= 1");
  return in >= k ? (in - k) / stride + 1 : 0;
}

template <typename T>
struct PoolResult {
  Tensor<T> output;
  std::vector<std::size_t> argmax;  // flat input index feeding each output
};

// Window maximum; ties resolve to the first position in row-major order.
template <typename T>
PoolResult<T> maxpool_forward(const Tensor<T>& x, std::size_t kh = 2, std::size_t kw = 2,
                              std::size_t stride = 2) {
  if (x.rank() != 4) throw ShapeError("maxpool expects NHWC input");
  const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
  const std::size_t oh = pool_out_extent(h, kh, stride);
  const std::size_t ow = pool_out_extent(w, kw, stride);
  if (oh == 0 || ow == 0) throw ShapeError("maxpool window larger than input");
  PoolResult<T> r{Tensor<T>({n, oh, ow, c}), std::vector<std::size_t>(n * oh * ow * c)};
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        for (std::size_t ch = 0; ch < c; ++ch) {
          std::size_t best = ((b * h + oy * stride) * w + ox * stride) * c + ch;
          T best_v = x[best];
          for (std::size_t ky = 0; ky < kh; ++ky) {
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const std::size_t idx = ((b * h + oy * stride + ky) * w + ox * stride + kx) * c + ch;
              if (x[idx] > best_v) {
                best_v = x[idx];
                best = idx;
              }
            }
          }
          const std::size_t o = ((b * oh + oy) * ow + ox) * c + ch;
          r.output[o] = best_v;
          r.argmax[o] = best;
        }
      }
    }
  }
  return r;
}

template <typename T>
Tensor<T> maxpool_backward(const Tensor<T>& dy, const std::vector<std::size_t>& argmax,
                           const Shape& input_shape) {
  if (dy.size() != argmax.size()) throw ShapeError("maxpool gradient size mismatch");
  Tensor<T> dx(input_shape);
  for (std::size_t o = 0; o < argmax.size(); ++o) dx[argmax[o]] += dy[o];
  return dx;
}

// --- batch normalization ----------------------------------------------------

inline constexpr double kBatchNormEpsilon = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

template <typename T>
struct BatchNormCache {
  Tensor<T> normalized;
  std::vector<T> inv_std;
};

// Normalizes each channel (last axis) over every other axis using batch
// statistics and folds them into the running estimates.
template <typename T>
Tensor<T> batchnorm_train(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                          BatchNormCache<T>& cache, Tensor<T>* running_mean = nullptr,
                          Tensor<T>* running_var = nullptr,
                          double momentum = kBatchNormMomentum, double eps = kBatchNormEpsilon) {
  if (x.dim(0) < 2) throw ContractError("batchnorm in training mode needs a batch of at least 2");
  const std::size_t c = x.shape().back();
  if (gamma.size() != c || beta.size() != c) throw ShapeError("batchnorm gamma/beta length mismatch");
  const std::size_t m = x.size() / c;
  std::vector<double> mean(c, 0.0), var(c, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) mean[ch] += x[i * c + ch];
  for (auto& v : mean) v /= static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double d = x[i * c + ch] - mean[ch];
      var[ch] += d * d;
    }
  }
  for (auto& v : var) v /= static_cast<double>(m);
  cache.inv_std.resize(c);
  for (std::size_t ch = 0; ch < c; ++ch) cache.inv_std[ch] = static_cast<T>(1.0 / std::sqrt(var[ch] + eps));
  cache.normalized = Tensor<T>(x.shape());
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const T xh = static_cast<T>(x[i * c + ch] - mean[ch]) * cache.inv_std[ch];
      cache.normalized[i * c + ch] = xh;
      y[i * c + ch] = gamma[ch] * xh + beta[ch];
    }
  }
  if (running_mean && running_var) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      (*running_mean)[ch] = static_cast<T>(momentum * (*running_mean)[ch] + (1.0 - momentum) * mean[ch]);
      (*running_var)[ch] = static_cast<T>(momentum * (*running_var)[ch] + (1.0 - momentum) * var[ch]);
    }
  }
  return y;
}

template <typename T>
Tensor<T> batchnorm_infer(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                          const Tensor<T>& running_mean, const Tensor<T>& running_var,
                          double eps = kBatchNormEpsilon) {
  const std::size_t c = x.shape().back();
  if (gamma.size() != c || beta.size() != c || running_mean.size() != c || running_var.size() != c)
    throw ShapeError("batchnorm parameter length mismatch");
  std::vector<T> scale(c), shift(c);
  for (std::size_t ch = 0; ch < c; ++ch) {
    scale[ch] = static_cast<T>(gamma[ch] / std::sqrt(static_cast<double>(running_var[ch]) + eps));
    shift[ch] = beta[ch] - running_mean[ch] * scale[ch];
  }
  Tensor<T> y(x.shape());
  const std::size_t m = x.size() / c;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) y[i * c + ch] = x[i * c + ch] * scale[ch] + shift[ch];
  return y;
}

template <typename T>
struct BatchNormGradients {
  Tensor<T> input, gamma, beta;
};

template <typename T>
BatchNormGradients<T> batchnorm_backward(const Tensor<T>& dy, const Tensor<T>& gamma,
                                         const BatchNormCache<T>& cache) {
  const std::size_t c = gamma.size();
  const std::size_t m = dy.size() / c;
  if (cache.normalized.size() != dy.size()) throw ShapeError("batchnorm gradient size mismatch");
  std::vector<double> sum_dy(c, 0.0), sum_dy_xh(c, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      sum_dy[ch] += dy[i * c + ch];
      sum_dy_xh[ch] += static_cast<double>(dy[i * c + ch]) * cache.normalized[i * c + ch];
    }
  }
  BatchNormGradients<T> g{Tensor<T>(dy.shape()), Tensor<T>({c}), Tensor<T>({c})};
  for (std::size_t ch = 0; ch < c; ++ch) {
    g.gamma[ch] = static_cast<T>(sum_dy_xh[ch]);
    g.beta[ch] = static_cast<T>(sum_dy[ch]);
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double xh = cache.normalized[i * c + ch];
      const double v = static_cast<double>(gamma[ch]) * cache.inv_std[ch] * inv_m *
                       (static_cast<double>(m) * dy[i * c + ch] - sum_dy[ch] - xh * sum_dy_xh[ch]);
      g.input[i * c + ch] = static_cast<T>(v);
    }
  }
  return g;
}

// --- activation and dropout -------------------------------------------------

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
  return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy) {
  Tensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
  return dx;
}

// Inverted-dropout multipliers: 0 with probability p, 1/(1-p) otherwise.
// Keyed by (seed, step) so a given pass always draws the same mask.
template <typename T>
std::vector<T> dropout_mask(std::size_t n, double p, std::uint64_t seed, std::uint64_t step) {
  if (!(p >= 0.0 && p < 1.0)) throw ParameterError("dropout probability must be in [0, 1)");
  std::vector<T> mask(n);
  const T keep = static_cast<T>(1.0 / (1.0 - p));
  const KeyedStream stream(derive_seed(seed, {step}));
  for (std::size_t i = 0; i < n; ++i) mask[i] = stream.uniform(i) < p ? T{0} : keep;
  return mask;
}

template <typename T>
Tensor<T> apply_mask(const Tensor<T>& x, std::span<const T> mask) {
  if (mask.size() != x.size()) throw ShapeError("dropout mask size mismatch");
  Tensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] * mask[i];
  return y;
}

// --- fully connected --------------------------------------------------------

// Any input is viewed as (batch, features).
template <typename T>
Tensor<T> dense_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  if (w.rank() != 2) throw ShapeError("dense weights must be (in, out)");
  const std::size_t n = x.dim(0);
  const std::size_t d = x.size() / n;
  if (d != w.dim(0))
    throw ShapeError("dense input has " + std::to_string(d) + " features, weights expect " +
                     std::to_string(w.dim(0)));
  const std::size_t u = w.dim(1);
  if (b.size() != u) throw ShapeError("dense bias length must equal output units");
  Tensor<T> y({n, u});
  auto ym = as_matrix(y, n);
  ym.noalias() = as_matrix(x, n) * as_matrix(w, d);
  ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b.data(), static_cast<Eigen::Index>(u));
  return y;
}

template <typename T>
struct DenseGradients {
  Tensor<T> input, weights, bias;
};

template <typename T>
void dense_backward_into(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy, DenseGradients<T>& g,
                         bool need_input = true) {
  const std::size_t n = x.dim(0);
  const std::size_t d = x.size() / n;
  const std::size_t u = w.dim(1);
  if (dy.size() != n * u) throw ShapeError("dense output gradient has wrong size");
  const auto dym = as_matrix(dy, n);
  ensure_shape(g.weights, w.shape());
  as_matrix(g.weights, d).noalias() = as_matrix(x, n).transpose() * dym;
  ensure_shape(g.bias, {u});
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(g.bias.data(), static_cast<Eigen::Index>(u)) =
      dym.colwise().sum();
  if (need_input) {
    ensure_shape(g.input, x.shape());
    as_matrix(g.input, n).noalias() = dym * as_matrix(w, d).transpose();
  } else {
    g.input = Tensor<T>();
  }
}

template <typename T>
DenseGradients<T> dense_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy,
                                 bool need_input = true) {
  DenseGradients<T> g;
  dense_backward_into(x, w, dy, g, need_input);
  return g;
}

// --- softmax and loss -------------------------------------------------------

// Row-wise softmax of (batch, classes) logits with max subtraction.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  const std::size_t n = logits.dim(0);
  const std::size_t k = logits.size() / n;
  Tensor<T> p({n, k});
  for (std::size_t i = 0; i < n; ++i) {
    const T* z = logits.data() + i * k;
    const T mx = *std::max_element(z, z + k);
    T sum = 0;
    for (std::size_t j = 0; j < k; ++j) {
      p[i * k + j] = std::exp(z[j] - mx);
      sum += p[i * k + j];
    }
    for (std::size_t j = 0; j < k; ++j) p[i * k + j] /= sum;
  }
  return p;
}

inline constexpr double kProbabilityFloor = 1e-12;

// -(1/N) sum ln p[true class]; probabilities are floored before the log.
template <typename T>
double cross_entropy(const Tensor<T>& probs, std::span<const int> labels) {
  const std::size_t n = probs.dim(0);
  const std::size_t k = probs.size() / n;
  if (labels.size() != n) throw ShapeError("label count does not match batch size");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) throw ShapeError("label out of range");
    total -= std::log(std::max(static_cast<double>(probs[i * k + static_cast<std::size_t>(labels[i])]),
                               kProbabilityFloor));
  }
  return total / static_cast<double>(n);
}

// Gradient of the mean cross-entropy with respect to the logits.
template <typename T>
Tensor<T> cross_entropy_grad(const Tensor<T>& probs, std::span<const int> labels) {
  const std::size_t n = probs.dim(0);
  const std::size_t k = probs.size() / n;
  if (labels.size() != n) throw ShapeError("label count does not match batch size");
  Tensor<T> g({n, k});
  const T inv_n = T{1} / static_cast<T>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const T target = static_cast<std::size_t>(labels[i]) == j ? T{1} : T{0};
      g[i * k + j] = (probs[i * k + j] - target) * inv_n;
    }
  }
  return g;
}

// lambda * sum of squared weights.
template <typename T>
double l2_penalty(std::span<const Tensor<T>* const> weights, double lambda) {
  if (lambda < 0.0) throw ParameterError("L2 coefficient must be >= 0");
  double s = 0.0;
  for (const Tensor<T>* w : weights)
    for (T v : w->values()) s += static_cast<double>(v) * v;
  return lambda * s;
}

struct LossValue {
  double data = 0.0;
  double penalty = 0.0;
  double total() const { return data + penalty; }
};

template <typename T>
LossValue loss(const Tensor<T>& probs, std::span<const int> labels,
               std::span<const Tensor<T>* const> weights, double lambda) {
  return {cross_entropy(probs, labels), l2_penalty(weights, lambda)};
}

}  // namespace dramnet::nn
