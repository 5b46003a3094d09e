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

// Declarative network descriptions and symbolic shape inference.
//
// A network is an ordered list of LayerSpecs. Conv2D, Pool and Full layers
// open a new "row" (a numbered block such as Layer4); BatchNorm, ReLU,
// Dropout and Softmax attach to the row before them.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/errors.hpp"
#include "dramnet/ops.hpp"

namespace dramnet::nn {

enum class LayerKind : std::uint8_t { Conv2D, Pool, BatchNorm, ReLU, Dropout, Full, Softmax };

inline constexpr std::string_view layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::Conv2D: return "Conv2D";
    case LayerKind::Pool: return "Pool";
    case LayerKind::BatchNorm: return "BatchNorm";
    case LayerKind::ReLU: return "ReLU";
    case LayerKind::Dropout: return "Dropout";
    case LayerKind::Full: return "Full";
    case LayerKind::Softmax: return "Softmax";
  }
  return "?";
}

inline LayerKind parse_layer_kind(std::string_view s) {
  for (auto k : {LayerKind::Conv2D, LayerKind::Pool, LayerKind::BatchNorm, LayerKind::ReLU,
                 LayerKind::Dropout, LayerKind::Full, LayerKind::Softmax}) {
    if (layer_kind_name(k) == s) return k;
  }
  throw FormatError("unknown layer kind '" + std::string(s) + "'");
}

inline constexpr bool opens_row(LayerKind k) {
  return k == LayerKind::Conv2D || k == LayerKind::Pool || k == LayerKind::Full;
}

struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride = 0;
  std::size_t units = 0;  // output channels (Conv2D) or output units (Full)
  double dropout_p = 0.0;

  static LayerSpec conv(std::size_t k, std::size_t channels, std::size_t stride = 1) {
    return {LayerKind::Conv2D, k, k, stride, channels, 0.0};
  }
  static LayerSpec pool(std::size_t k = 2, std::size_t stride = 2) {
    return {LayerKind::Pool, k, k, stride, 0, 0.0};
  }
  static LayerSpec full(std::size_t units) { return {LayerKind::Full, 0, 0, 0, units, 0.0}; }
  static LayerSpec batchnorm() { return {LayerKind::BatchNorm}; }
  static LayerSpec relu() { return {LayerKind::ReLU}; }
  static LayerSpec dropout(double p) { return {LayerKind::Dropout, 0, 0, 0, 0, p}; }
  static LayerSpec softmax() { return {LayerKind::Softmax}; }

  bool operator==(const LayerSpec&) const = default;
};

// Height x width x channels; fully connected activations are 1 x 1 x units.
struct Dims {
  std::size_t h = 0, w = 0, c = 0;

  std::size_t flat() const { return h * w * c; }
  bool is_vector() const { return h == 1 && w == 1; }
  bool operator==(const Dims&) const = default;
};

inline std::string format_dims(const Dims& d) {
  if (d.is_vector()) return std::to_string(d.c);
  return std::to_string(d.h) + " x " + std::to_string(d.w) + " x " + std::to_string(d.c);
}

struct ArchitectureSpec {
  std::string name;
  Dims input{64, 64, 1};
  std::vector<LayerSpec> layers;
  std::size_t n_classes = 3;

  bool operator==(const ArchitectureSpec&) const = default;
};

inline void to_json(nlohmann::json& j, const LayerSpec& l) {
  j = {{"kind", std::string(layer_kind_name(l.kind))}};
  if (l.kind == LayerKind::Conv2D || l.kind == LayerKind::Pool) {
    j["kernel"] = {l.kernel_h, l.kernel_w};
    j["stride"] = l.stride;
  }
  if (l.kind == LayerKind::Conv2D || l.kind == LayerKind::Full) j["units"] = l.units;
  if (l.kind == LayerKind::Dropout) j["p"] = l.dropout_p;
}

inline void from_json(const nlohmann::json& j, LayerSpec& l) {
  l = {};
  l.kind = parse_layer_kind(j.at("kind").get<std::string>());
  if (j.contains("kernel")) {
    l.kernel_h = j["kernel"].at(0).get<std::size_t>();
    l.kernel_w = j["kernel"].at(1).get<std::size_t>();
  }
  l.stride = j.value("stride", std::size_t{0});
  l.units = j.value("units", std::size_t{0});
  l.dropout_p = j.value("p", 0.0);
}

inline void to_json(nlohmann::json& j, const ArchitectureSpec& a) {
  j = {{"name", a.name},
       {"input", {a.input.h, a.input.w, a.input.c}},
       {"layers", a.layers},
       {"n_classes", a.n_classes}};
}

inline void from_json(const nlohmann::json& j, ArchitectureSpec& a) {
  a.name = j.at("name").get<std::string>();
  const auto& in = j.at("input");
  a.input = {in.at(0).get<std::size_t>(), in.at(1).get<std::size_t>(), in.at(2).get<std::size_t>()};
  a.layers = j.at("layers").get<std::vector<LayerSpec>>();
  a.n_classes = j.at("n_classes").get<std::size_t>();
}

// --- shape inference --------------------------------------------------------

struct ShapeRow {
  std::size_t index = 0;  // position in ArchitectureSpec::layers
  std::size_t row = 0;    // 1-based block number ("Layer<row>")
  LayerSpec spec;
  Dims input, output;
  std::uint64_t params = 0;  // stored values: weights, biases, gamma/beta and running stats
};

// One line per numbered block, the granularity of a layer table.
struct BlockRow {
  std::size_t row = 0;
  std::string type;  // Conv2D, Pool, Full, or Out for the classifier
  std::string kernel;
  std::string stride;
  std::string count;
  Dims input;
  std::uint64_t params = 0;
};

struct ShapeTable {
  std::string arch;
  Dims input;
  std::vector<ShapeRow> layers;
  std::uint64_t total_params = 0;

  std::vector<BlockRow> blocks() const;
};

inline std::string block_name(std::size_t row) { return "Layer" + std::to_string(row); }

inline ShapeTable infer_shapes(const ArchitectureSpec& arch, std::optional<Dims> input = std::nullopt) {
  ShapeTable table;
  table.arch = arch.name;
  table.input = input.value_or(arch.input);
  if (table.input.flat() == 0) throw ShapeError(arch.name + ": input dimensions must be positive");
  if (arch.layers.empty()) throw ShapeError(arch.name + ": no layers");
  Dims cur = table.input;
  std::size_t row = 0;
  bool flattened = false;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& l = arch.layers[i];
    if (opens_row(l.kind)) ++row;
    if (row == 0) throw ShapeError(arch.name + ": " + std::string(layer_kind_name(l.kind)) + " before first block");
    const std::string where = arch.name + " " + block_name(row) + " (" + std::string(layer_kind_name(l.kind)) + ")";
    ShapeRow r{i, row, l, cur, cur, 0};
    switch (l.kind) {
      case LayerKind::Conv2D: {
        if (flattened) throw ShapeError(where + ": convolution after flattening");
        if (l.kernel_h == 0 || l.kernel_w == 0 || l.stride == 0 || l.units == 0)
          throw ShapeError(where + ": kernel, stride and channel count must be positive");
        r.output = {conv_out_extent(cur.h, l.kernel_h, l.stride, Padding::Same),
                    conv_out_extent(cur.w, l.kernel_w, l.stride, Padding::Same), l.units};
        r.params = std::uint64_t{l.kernel_h} * l.kernel_w * cur.c * l.units + l.units;
        break;
      }
      case LayerKind::Pool: {
        if (flattened) throw ShapeError(where + ": pooling after flattening");
        if (l.kernel_h == 0 || l.kernel_w == 0 || l.stride == 0)
          throw ShapeError(where + ": kernel and stride must be positive");
        r.output = {pool_out_extent(cur.h, l.kernel_h, l.stride),
                    pool_out_extent(cur.w, l.kernel_w, l.stride), cur.c};
        break;
      }
      case LayerKind::Full: {
        if (l.units == 0) throw ShapeError(where + ": unit count must be positive");
        r.output = {1, 1, l.units};
        flattened = true;
        r.params = std::uint64_t{cur.flat()} * l.units + l.units;
        break;
      }
      case LayerKind::BatchNorm:
        r.params = 4ull * cur.c;
        break;
      case LayerKind::Dropout:
        if (!(l.dropout_p >= 0.0 && l.dropout_p < 1.0)) throw ShapeError(where + ": dropout p must be in [0, 1)");
        break;
      case LayerKind::ReLU:
      case LayerKind::Softmax:
        break;
    }
    if (r.output.h == 0 || r.output.w == 0 || r.output.c == 0)
      throw ShapeError(where + ": non-positive output dimension " + format_dims(r.output) +
                       " from input " + format_dims(cur));
    table.total_params += r.params;
    table.layers.push_back(r);
    cur = r.output;
  }
  const LayerSpec& last = arch.layers.back();
  if (last.kind != LayerKind::Softmax || arch.layers.size() < 2 ||
      arch.layers[arch.layers.size() - 2].kind != LayerKind::Full)
    throw ShapeError(arch.name + ": network must end with Full followed by Softmax");
  if (arch.layers[arch.layers.size() - 2].units != arch.n_classes)
    throw ShapeError(arch.name + ": classifier width " + std::to_string(arch.layers[arch.layers.size() - 2].units) +
                     " does not match n_classes " + std::to_string(arch.n_classes));
  return table;
}

inline std::vector<BlockRow> ShapeTable::blocks() const {
  std::vector<BlockRow> out;
  for (const ShapeRow& r : layers) {
    if (opens_row(r.spec.kind)) {
      BlockRow b;
      b.row = r.row;
      b.type = std::string(layer_kind_name(r.spec.kind));
      b.input = r.input;
      if (r.spec.kind != LayerKind::Full) {
        b.kernel = std::to_string(r.spec.kernel_h) + " x " + std::to_string(r.spec.kernel_w);
        b.stride = std::to_string(r.spec.stride);
      }
      if (r.spec.kind != LayerKind::Pool) b.count = std::to_string(r.spec.units);
      out.push_back(b);
    }
    out.back().params += r.params;
  }
  if (!out.empty() && out.back().type == "Full") out.back().type = "Out";
  return out;
}

inline nlohmann::json to_json(const ShapeTable& t) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& r : t.layers) {
    layers.push_back({{"index", r.index}, {"block", block_name(r.row)},
                      {"kind", std::string(layer_kind_name(r.spec.kind))},
                      {"input", format_dims(r.input)}, {"output", format_dims(r.output)},
                      {"flat_input", r.input.flat()}, {"params", r.params}});
  }
  return {{"arch", t.arch}, {"input", format_dims(t.input)}, {"layers", layers},
          {"total_params", t.total_params}};
}

}  // namespace dramnet::nn
