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

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "dramnet/architecture.hpp"
#include "dramnet/errors.hpp"

namespace dramnet::train {

using nn::ArchitectureSpec;
using nn::LayerSpec;

inline constexpr std::size_t kFullInput = 1024;
inline constexpr std::size_t kDeskInput = 64;

// Four conv blocks (Conv -> BatchNorm -> ReLU) with three 2x2 max pools, then
// two Full -> BatchNorm -> ReLU -> Dropout(0.5) blocks and the classifier.
inline ArchitectureSpec dramnet_spec(std::size_t input, std::size_t n_classes = 3) {
  ArchitectureSpec a;
  a.name = "dramnet";
  a.input = {input, input, 1};
  a.n_classes = n_classes;
  const auto conv_block = [&](std::size_t channels) {
    a.layers.push_back(LayerSpec::conv(3, channels));
    a.layers.push_back(LayerSpec::batchnorm());
    a.layers.push_back(LayerSpec::relu());
  };
  const auto full_block = [&](std::size_t units) {
    a.layers.push_back(LayerSpec::full(units));
    a.layers.push_back(LayerSpec::batchnorm());
    a.layers.push_back(LayerSpec::relu());
    a.layers.push_back(LayerSpec::dropout(0.5));
  };
  conv_block(3);     // Layer1
  conv_block(64);    // Layer2
  a.layers.push_back(LayerSpec::pool());  // Layer3
  conv_block(128);   // Layer4
  a.layers.push_back(LayerSpec::pool());  // Layer5
  conv_block(192);   // Layer6
  a.layers.push_back(LayerSpec::pool());  // Layer7
  full_block(2048);  // Layer8
  full_block(2048);  // Layer9
  a.layers.push_back(LayerSpec::full(n_classes));  // Layer10
  a.layers.push_back(LayerSpec::softmax());
  return a;
}

inline ArchitectureSpec dramnet_full() { return dramnet_spec(kFullInput); }
inline ArchitectureSpec dramnet_desk() { return dramnet_spec(kDeskInput); }

// AlexNet-flavoured comparator sized for small inputs: 11x11/5x5/3x3 kernels.
inline ArchitectureSpec alexnet_s(std::size_t input = kDeskInput, std::size_t n_classes = 3) {
  ArchitectureSpec a;
  a.name = "alexnet-s";
  a.input = {input, input, 1};
  a.n_classes = n_classes;
  const auto conv = [&](std::size_t k, std::size_t ch, std::size_t stride) {
    a.layers.push_back(LayerSpec::conv(k, ch, stride));
    a.layers.push_back(LayerSpec::batchnorm());
    a.layers.push_back(LayerSpec::relu());
  };
  conv(11, 32, 2);
  a.layers.push_back(LayerSpec::pool());
  conv(5, 64, 1);
  a.layers.push_back(LayerSpec::pool());
  conv(3, 96, 1);
  conv(3, 96, 1);
  conv(3, 64, 1);
  a.layers.push_back(LayerSpec::pool());
  for (int i = 0; i < 2; ++i) {
    a.layers.push_back(LayerSpec::full(512));
    a.layers.push_back(LayerSpec::batchnorm());
    a.layers.push_back(LayerSpec::relu());
    a.layers.push_back(LayerSpec::dropout(0.5));
  }
  a.layers.push_back(LayerSpec::full(n_classes));
  a.layers.push_back(LayerSpec::softmax());
  return a;
}

// VGG-flavoured comparator: paired 3x3 convs at depths 32/64/128.
inline ArchitectureSpec vggnet_s(std::size_t input = kDeskInput, std::size_t n_classes = 3) {
  ArchitectureSpec a;
  a.name = "vggnet-s";
  a.input = {input, input, 1};
  a.n_classes = n_classes;
  for (std::size_t depth : {32u, 64u, 128u}) {
    for (int i = 0; i < 2; ++i) {
      a.layers.push_back(LayerSpec::conv(3, depth));
      a.layers.push_back(LayerSpec::batchnorm());
      a.layers.push_back(LayerSpec::relu());
    }
    a.layers.push_back(LayerSpec::pool());
  }
  for (int i = 0; i < 2; ++i) {
    a.layers.push_back(LayerSpec::full(512));
    a.layers.push_back(LayerSpec::batchnorm());
    a.layers.push_back(LayerSpec::relu());
    a.layers.push_back(LayerSpec::dropout(0.5));
  }
  a.layers.push_back(LayerSpec::full(n_classes));
  a.layers.push_back(LayerSpec::softmax());
  return a;
}

inline std::map<std::string, ArchitectureSpec> presets() {
  return {{"dramnet_full", dramnet_full()},
          {"dramnet_desk", dramnet_desk()},
          {"alexnet_s", alexnet_s()},
          {"vggnet_s", vggnet_s()}};
}

// Preset family by CLI name ("dramnet", "alexnet-s", "vggnet-s") at a given
// square input size.
inline ArchitectureSpec preset_for(std::string_view family, std::size_t input, std::size_t n_classes = 3) {
  if (family == "dramnet") return dramnet_spec(input, n_classes);
  if (family == "alexnet-s") return alexnet_s(input, n_classes);
  if (family == "vggnet-s") return vggnet_s(input, n_classes);
  throw ParameterError("unknown architecture '" + std::string(family) + "'");
}

// The reference layer table for the full-size network, including the two
// rows whose listed input size is inconsistent with the layer before it.
struct ReferenceRow {
  std::size_t row;
  std::string_view type;
  std::string_view kernel;
  std::string_view stride;
  std::string_view count;
  std::string_view input;
  std::string_view note;  // empty when the listed value is reproduced
};

inline constexpr std::array<ReferenceRow, 10> kReferenceDramnetTable = {{
    {1, "Conv2D", "3 x 3", "1", "3", "1024 x 1024 x 1", ""},
    {2, "Conv2D", "3 x 3", "1", "64", "1024 x 1024 x 3", ""},
    {3, "Pool", "2 x 2", "2", "", "1024 x 1024 x 64", ""},
    {4, "Conv2D", "3 x 3", "1", "128", "512 x 512 x 64", ""},
    {5, "Pool", "2 x 2", "2", "", "180 x 512 x 512",
     "listed '180 x 512 x 512' cannot follow Layer4 (512 x 512 x 64 -> 128 kernels); inferred 512 x 512 x 128"},
    {6, "Conv2D", "3 x 3", "1", "192", "256 x 256 x 128", ""},
    {7, "Pool", "2 x 2", "2", "", "128 x 128 x 192",
     "listed '128 x 128 x 192' is this pool's output; its input is Layer6's output 256 x 256 x 192"},
    {8, "Full", "", "", "2048", "128 x 128 x 192", ""},
    {9, "Full", "", "", "2048", "2048", ""},
    {10, "Out", "", "", "3", "2048", ""},
}};

}  // namespace dramnet::train
