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
#include <numbers>

#include <gtest/gtest.h>

#include "dramnet/ops.hpp"
#include "support/oracles.hpp"

namespace dramnet::nn {
namespace {

using testing::random_tensor;

constexpr double kGradTolerance = 1e-4;

TEST(GradientCheck, Conv) { EXPECT_LT(testing::check_conv(12).max_error, kGradTolerance); }
TEST(GradientCheck, Pool) { EXPECT_LT(testing::check_pool(12).max_error, kGradTolerance); }
TEST(GradientCheck, BatchNorm) { EXPECT_LT(testing::check_batchnorm(12).max_error, kGradTolerance); }
TEST(GradientCheck, Relu) { EXPECT_LT(testing::check_relu(12).max_error, kGradTolerance); }
TEST(GradientCheck, DropoutFixedMask) { EXPECT_LT(testing::check_dropout(12).max_error, kGradTolerance); }
TEST(GradientCheck, Dense) { EXPECT_LT(testing::check_dense(12).max_error, kGradTolerance); }
TEST(GradientCheck, SoftmaxCrossEntropyAndL2) {
  EXPECT_LT(testing::check_softmax_loss(12).max_error, kGradTolerance);
}

// Direct nested-loop cross-correlation with explicit zero padding.
Tensor<double> naive_conv(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>& b,
                          std::size_t stride, std::size_t pad_top, std::size_t pad_left, std::size_t oh,
                          std::size_t ow) {
  const std::size_t n = x.dim(0), h = x.dim(1), wd = x.dim(2), cin = x.dim(3);
  const std::size_t kh = w.dim(0), kw = w.dim(1), cout = w.dim(3);
  Tensor<double> y({n, oh, ow, cout});
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox)
        for (std::size_t co = 0; co < cout; ++co) {
          double acc = b[co];
          for (std::size_t ky = 0; ky < kh; ++ky)
            for (std::size_t kx = 0; kx < kw; ++kx) {
              const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad_top);
              const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad_left);
              if (iy < 0 || ix < 0 || iy >= static_cast<long>(h) || ix >= static_cast<long>(wd)) continue;
              for (std::size_t ci = 0; ci < cin; ++ci)
                acc += x.at(s, static_cast<std::size_t>(iy), static_cast<std::size_t>(ix), ci) *
                       w.at(ky, kx, ci, co);
            }
          y.at(s, oy, ox, co) = acc;
        }
  return y;
}

TEST(Conv2d, MatchesNaiveSamePadding) {
  const auto x = random_tensor({2, 7, 6, 3}, 1);
  const auto w = random_tensor({3, 3, 3, 4}, 2);
  const auto b = random_tensor({4}, 3);
  const auto y = conv2d_forward(x, w, b, 1, Padding::Same);
  ASSERT_EQ(y.shape(), (Shape{2, 7, 6, 4}));
  const auto ref = naive_conv(x, w, b, 1, 1, 1, 7, 6);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
}

TEST(Conv2d, SamePaddingExtraGoesAfter) {
  // in 6, k 2, stride 2: out 3, total pad 0; in 7, k 4, stride 2: out 4, total pad 3 -> before 1
  std::size_t before = 9;
  EXPECT_EQ(conv_out_extent(6, 2, 2, Padding::Same, &before), 3u);
  EXPECT_EQ(before, 0u);
  EXPECT_EQ(conv_out_extent(7, 4, 2, Padding::Same, &before), 4u);
  EXPECT_EQ(before, 1u);
  const auto x = random_tensor({1, 7, 7, 1}, 4);
  const auto w = random_tensor({4, 4, 1, 2}, 5);
  const auto b = random_tensor({2}, 6);
  const auto y = conv2d_forward(x, w, b, 2, Padding::Same);
  const auto ref = naive_conv(x, w, b, 2, 1, 1, 4, 4);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
}

TEST(Conv2d, ValidPadding) {
  EXPECT_EQ(conv_out_extent(7, 3, 2, Padding::Valid), 3u);
  const auto x = random_tensor({1, 7, 5, 2}, 7);
  const auto w = random_tensor({3, 3, 2, 1}, 8);
  const auto b = random_tensor({1}, 9);
  const auto y = conv2d_forward(x, w, b, 2, Padding::Valid);
  const auto ref = naive_conv(x, w, b, 2, 0, 0, 3, 2);
  ASSERT_EQ(y.size(), ref.size());
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[i], 1e-12);
}

TEST(Conv2d, ChannelMismatchIsShapeError) {
  const auto x = random_tensor({1, 4, 4, 2}, 1);
  const auto w = random_tensor({3, 3, 3, 1}, 2);
  EXPECT_THROW(conv2d_forward(x, w, Tensor<double>({1})), ShapeError);
}

TEST(MaxPool, FirstMaximumWinsTies) {
  Tensor<double> x({1, 2, 2, 1}, std::vector<double>{5, 5, 5, 5});
  const auto r = maxpool_forward(x);
  EXPECT_EQ(r.output[0], 5);
  EXPECT_EQ(r.argmax[0], 0u);
  const auto dx = maxpool_backward(Tensor<double>({1, 1, 1, 1}, std::vector<double>{2}), r.argmax, x.shape());
  EXPECT_EQ(dx.values()[0], 2);
  EXPECT_EQ(dx.values()[3], 0);
}

TEST(MaxPool, OddExtentDropsRemainder) {
  const auto x = random_tensor({1, 5, 5, 2}, 3);
  EXPECT_EQ(maxpool_forward(x).output.shape(), (Shape{1, 2, 2, 2}));
}

TEST(BatchNorm, NormalizesPerChannel) {
  const auto x = random_tensor({6, 3}, 1, -4, 4);
  BatchNormCache<double> cache;
  Tensor<double> rm({3}), rv({3}, 1.0);
  const auto y = batchnorm_train(x, Tensor<double>({3}, 1.0), Tensor<double>({3}), cache, &rm, &rv);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0, var = 0, xm = 0, xv = 0;
    for (std::size_t i = 0; i < 6; ++i) {
      mean += y[i * 3 + c];
      xm += x[i * 3 + c];
    }
    mean /= 6;
    xm /= 6;
    for (std::size_t i = 0; i < 6; ++i) {
      var += (y[i * 3 + c] - mean) * (y[i * 3 + c] - mean);
      xv += (x[i * 3 + c] - xm) * (x[i * 3 + c] - xm);
    }
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(var / 6, xv / 6 / (xv / 6 + kBatchNormEpsilon), 1e-9);
    // running estimates move 10% toward the batch statistics (biased variance)
    EXPECT_NEAR(rm[c], 0.1 * xm, 1e-12);
    EXPECT_NEAR(rv[c], 0.9 + 0.1 * xv / 6, 1e-12);
  }
}

TEST(BatchNorm, InferenceUsesRunningStatistics) {
  const auto x = random_tensor({2, 2}, 2);
  const Tensor<double> rm({2}, std::vector<double>{0.5, -1});
  const Tensor<double> rv({2}, std::vector<double>{4, 0.25});
  const Tensor<double> g({2}, std::vector<double>{2, 1});
  const Tensor<double> b({2}, std::vector<double>{0, 3});
  const auto y = batchnorm_infer(x, g, b, rm, rv);
  EXPECT_NEAR(y[0], 2 * (x[0] - 0.5) / std::sqrt(4 + 1e-5), 1e-12);
  EXPECT_NEAR(y[3], (x[3] + 1) / std::sqrt(0.25 + 1e-5) + 3, 1e-12);
}

TEST(BatchNorm, SingleSampleBatchIsContractError) {
  BatchNormCache<double> cache;
  EXPECT_THROW(batchnorm_train(random_tensor({1, 3}, 1), Tensor<double>({3}, 1.0), Tensor<double>({3}), cache),
               ContractError);
}

TEST(Relu, ClampsNegatives) {
  const Tensor<double> x({4}, std::vector<double>{-1, 0, 2, -0.5});
  EXPECT_EQ(relu_forward(x).values()[2], 2);
  EXPECT_EQ(relu_forward(x).values()[0], 0);
  EXPECT_EQ(relu_forward(x).values()[1], 0);
}

TEST(Dropout, MaskValuesAndRate) {
  const auto mask = dropout_mask<double>(100000, 0.5, 3, 7);
  std::size_t zeros = 0;
  for (double m : mask) {
    ASSERT_TRUE(m == 0.0 || m == 2.0);
    zeros += m == 0.0;
  }
  EXPECT_NEAR(zeros / 100000.0, 0.5, 0.005);
  EXPECT_EQ(mask, dropout_mask<double>(100000, 0.5, 3, 7));
  EXPECT_NE(mask, dropout_mask<double>(100000, 0.5, 3, 8));
  EXPECT_THROW(dropout_mask<double>(4, 1.0, 1, 1), ParameterError);
}

TEST(Softmax, KnownValues) {
  const Tensor<double> z({1, 3}, std::vector<double>{1, 2, 3});
  const auto p = softmax(z);
  EXPECT_NEAR(p[0], 0.09003057317038046, 1e-15);
  EXPECT_NEAR(p[1], 0.24472847105479764, 1e-15);
  EXPECT_NEAR(p[2], 0.6652409557748219, 1e-15);
}

TEST(Softmax, StableForLargeLogits) {
  const Tensor<double> z({1, 2}, std::vector<double>{1000, 1000});
  const auto p = softmax(z);
  EXPECT_EQ(p[0], 0.5);
  EXPECT_TRUE(p.all_finite());
}

TEST(CrossEntropy, UniformIsLogK) {
  const Tensor<double> p({2, 3}, 1.0 / 3.0);
  const std::vector<int> labels{0, 2};
  EXPECT_NEAR(cross_entropy(p, std::span<const int>(labels)), std::log(3.0), 1e-12);
  EXPECT_NEAR(std::log(3.0), 1.0986122886681098, 1e-15);
}

TEST(CrossEntropy, FloorsZeroProbability) {
  const Tensor<double> p({1, 2}, std::vector<double>{1, 0});
  const std::vector<int> label{1};
  EXPECT_NEAR(cross_entropy(p, std::span<const int>(label)), -std::log(1e-12), 1e-9);
}

TEST(CrossEntropy, LabelOutOfRange) {
  const Tensor<double> p({1, 2}, 0.5);
  const std::vector<int> label{2};
  EXPECT_THROW(cross_entropy(p, std::span<const int>(label)), ShapeError);
}

TEST(Loss, AddsL2Penalty) {
  const Tensor<double> p({1, 2}, 0.5);
  const std::vector<int> label{0};
  const Tensor<double> w({2}, std::vector<double>{3, 4});
  const Tensor<double>* ws[] = {&w};
  const auto l = loss<double>(p, std::span<const int>(label), ws, 0.01);
  EXPECT_NEAR(l.data, std::log(2.0), 1e-15);
  EXPECT_NEAR(l.penalty, 0.25, 1e-15);
  EXPECT_NEAR(l.total(), std::log(2.0) + 0.25, 1e-15);
}

TEST(Dense, ShapeErrors) {
  const auto x = random_tensor({2, 3}, 1);
  EXPECT_THROW(dense_forward(x, random_tensor({4, 2}, 2), Tensor<double>({2})), ShapeError);
  EXPECT_THROW(dense_forward(x, random_tensor({3, 2}, 2), Tensor<double>({3})), ShapeError);
}

}  // namespace
}  // namespace dramnet::nn
