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

// Glue between fingerprint images and network tensors.

#pragma once

#include <span>
#include <vector>

#include "dramnet/dram_sim.hpp"
#include "dramnet/imaging.hpp"
#include "dramnet/model.hpp"

namespace dramnet::pipeline {

using imaging::FingerprintImage;

inline std::vector<FingerprintImage> to_images(const sim::Dataset& ds, std::span<const std::size_t> indices) {
  std::vector<FingerprintImage> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(imaging::to_image(ds.measurements.at(i)));
  return out;
}

// Brings source-resolution images to the network input size; with `augment`
// every image is first expanded into its six crop variants.
inline std::vector<FingerprintImage> prepare_inputs(std::span<const FingerprintImage> images,
                                                    std::size_t rows, std::size_t cols, bool augment,
                                                    double crop_fraction) {
  std::vector<FingerprintImage> out;
  out.reserve(images.size() * (augment ? 6 : 1));
  for (const auto& img : images) {
    if (augment) {
      for (auto& v : imaging::six_crops(img, crop_fraction)) out.push_back(imaging::downscale(v, rows, cols));
    } else {
      out.push_back(imaging::downscale(img, rows, cols));
    }
  }
  return out;
}

// Stacks images[order[begin..end)] into an (N, H, W, 1) tensor in [0, 1].
template <typename T>
nn::Tensor<T> make_batch(std::span<const FingerprintImage> images, std::span<const std::size_t> order,
                         std::vector<int>* labels = nullptr) {
  if (order.empty()) throw ShapeError("empty batch");
  const auto& first = images[order.front()];
  nn::Tensor<T> x({order.size(), first.rows, first.cols, 1});
  const std::size_t plane = first.rows * first.cols;
  if (labels) labels->clear();
  for (std::size_t b = 0; b < order.size(); ++b) {
    const auto& img = images[order[b]];
    if (img.rows != first.rows || img.cols != first.cols) throw ShapeError("batch images differ in size");
    const auto norm = imaging::normalize<T>(img);
    std::copy(norm.values.begin(), norm.values.end(), x.data() + b * plane);
    if (labels) labels->push_back(static_cast<int>(img.label));
  }
  return x;
}

// Inference-mode class probabilities, one row per image.
template <typename T>
std::vector<std::vector<double>> predict_probabilities(nn::Model<T>& model,
                                                       std::span<const FingerprintImage> images,
                                                       std::size_t batch_size = 32) {
  std::vector<std::vector<double>> out;
  out.reserve(images.size());
  std::vector<std::size_t> order;
  for (std::size_t begin = 0; begin < images.size(); begin += batch_size) {
    const std::size_t end = std::min(images.size(), begin + batch_size);
    order.clear();
    for (std::size_t i = begin; i < end; ++i) order.push_back(i);
    const auto probs = model.predict(make_batch<T>(images, order));
    const std::size_t k = probs.dim(1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      std::vector<double> row(k);
      for (std::size_t j = 0; j < k; ++j) row[j] = static_cast<double>(probs[i * k + j]);
      out.push_back(std::move(row));
    }
  }
  return out;
}

inline std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace dramnet::pipeline
