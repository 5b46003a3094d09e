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

// Synthetic DRAM power-up fingerprints.
//
// Every cell carries a latent power-up probability drawn from a symmetric
// Beta(alpha, alpha): most cells are nearly always 0 or always 1 and a small
// fraction is noisy. Operating conditions move each cell in logit space by a
// global offset plus a per-cell sensitivity term. Anti-cells (alternating
// row blocks) invert the logical value read out.

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/errors.hpp"
#include "dramnet/grid.hpp"
#include "dramnet/random.hpp"

namespace dramnet::sim {

enum class ConditionKind : std::uint8_t { Nominal, HighTemp, LowTemp, HighVolt, LowVolt, Aged };

inline constexpr std::array<ConditionKind, 6> kAllConditions = {
    ConditionKind::Nominal, ConditionKind::HighTemp, ConditionKind::LowTemp,
    ConditionKind::HighVolt, ConditionKind::LowVolt, ConditionKind::Aged};

inline constexpr std::string_view condition_name(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::Nominal: return "nominal";
    case ConditionKind::HighTemp: return "high_temp";
    case ConditionKind::LowTemp: return "low_temp";
    case ConditionKind::HighVolt: return "high_volt";
    case ConditionKind::LowVolt: return "low_volt";
    case ConditionKind::Aged: return "aged";
  }
  return "?";
}

inline ConditionKind parse_condition(std::string_view name) {
  for (ConditionKind k : kAllConditions) {
    if (condition_name(k) == name) return k;
  }
  throw ParameterError("unknown condition '" + std::string(name) + "'");
}

struct Condition {
  ConditionKind kind = ConditionKind::Nominal;
  double magnitude = 1.0;

  bool operator==(const Condition&) const = default;
};

// Logit-space response of one condition: offset delta and the coupling s of
// the per-cell sensitivity.
struct ConditionCoupling {
  double shift = 0.0;
  double sensitivity = 0.0;

  bool operator==(const ConditionCoupling&) const = default;
};

struct SimParams {
  double bias_concentration = 0.05;
  std::array<ConditionCoupling, 6> coupling = {{
      {0.0, 0.0},    // nominal
      {0.5, 1.0},    // high_temp
      {-0.5, 1.0},   // low_temp
      {0.3, 0.5},    // high_volt
      {-0.3, 0.5},   // low_volt
      {0.0, 0.25},   // aged
  }};
  double sensitivity_scale = 1.0;
  double aging_drift = 0.4;
  std::uint32_t anti_cell_block_rows = 64;

  const ConditionCoupling& for_condition(ConditionKind k) const {
    return coupling[static_cast<std::size_t>(k)];
  }

  void validate() const {
    if (!(bias_concentration > 0.0)) throw ParameterError("bias_concentration must be > 0");
    if (!(sensitivity_scale > 0.0)) throw ParameterError("sensitivity_scale must be > 0");
    if (anti_cell_block_rows == 0) throw ParameterError("anti_cell_block_rows must be >= 1");
  }

  bool operator==(const SimParams&) const = default;
};

inline void to_json(nlohmann::json& j, const SimParams& p) {
  nlohmann::json shift = nlohmann::json::object();
  nlohmann::json sens = nlohmann::json::object();
  for (ConditionKind k : kAllConditions) {
    shift[std::string(condition_name(k))] = p.for_condition(k).shift;
    sens[std::string(condition_name(k))] = p.for_condition(k).sensitivity;
  }
  j = {{"bias_concentration", p.bias_concentration},
       {"condition_shift", shift},
       {"condition_sensitivity", sens},
       {"sensitivity_scale", p.sensitivity_scale},
       {"aging_drift", p.aging_drift},
       {"anti_cell_block_rows", p.anti_cell_block_rows}};
}

// Missing keys keep their defaults, so partial config files are accepted.
inline void from_json(const nlohmann::json& j, SimParams& p) {
  p.bias_concentration = j.value("bias_concentration", p.bias_concentration);
  p.sensitivity_scale = j.value("sensitivity_scale", p.sensitivity_scale);
  p.aging_drift = j.value("aging_drift", p.aging_drift);
  p.anti_cell_block_rows = j.value("anti_cell_block_rows", p.anti_cell_block_rows);
  for (ConditionKind k : kAllConditions) {
    auto& c = p.coupling[static_cast<std::size_t>(k)];
    const std::string name(condition_name(k));
    if (j.contains("condition_shift") && j["condition_shift"].contains(name))
      c.shift = j["condition_shift"][name].get<double>();
    if (j.contains("condition_sensitivity") && j["condition_sensitivity"].contains(name))
      c.sensitivity = j["condition_sensitivity"][name].get<double>();
  }
  p.validate();
}

inline void to_json(nlohmann::json& j, const Condition& c) {
  j = {{"kind", std::string(condition_name(c.kind))}, {"magnitude", c.magnitude}};
}

inline void from_json(const nlohmann::json& j, Condition& c) {
  c.kind = parse_condition(j.at("kind").get<std::string>());
  c.magnitude = j.value("magnitude", 1.0);
  if (!(c.magnitude >= 0.0)) throw ParameterError("condition magnitude must be >= 0");
}

struct DeviceModel {
  std::uint32_t device_id = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Grid<double> bias;           // power-up probability of the stored charge
  Grid<double> sensitivity;    // per-cell response to condition changes
  Grid<std::uint8_t> polarity; // 1 = true cell, 0 = anti-cell
  std::uint64_t seed = 0;

  bool operator==(const DeviceModel&) const = default;
};

struct Measurement {
  std::uint32_t device_id = 0;
  Condition condition;
  Grid<std::uint8_t> bits;
  std::uint64_t measurement_seed = 0;

  bool operator==(const Measurement&) const = default;
};

inline DeviceModel new_device(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              const SimParams& params = {}, std::uint32_t device_id = 0) {
  if (rows == 0 || cols == 0) throw DimensionError("device dimensions must be >= 1");
  params.validate();
  DeviceModel dev;
  dev.device_id = device_id;
  dev.rows = rows;
  dev.cols = cols;
  dev.seed = seed;
  dev.bias = Grid<double>(rows, cols);
  dev.sensitivity = Grid<double>(rows, cols);
  dev.polarity = Grid<std::uint8_t>(rows, cols);
  const KeyedStream bias_stream(derive_seed(seed, {1}));
  const KeyedStream sens_stream(derive_seed(seed, {2}));
  const double alpha = params.bias_concentration;
  const auto n = static_cast<std::int64_t>(rows * cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto cell = static_cast<std::uint64_t>(i);
    dev.bias[cell] = bias_stream.beta(cell, 0, alpha, alpha);
    dev.sensitivity[cell] = sens_stream.normal(cell);
    const std::size_t row = cell / cols;
    dev.polarity[cell] = (row / params.anti_cell_block_rows) % 2 == 0 ? 1 : 0;
  }
  return dev;
}

namespace detail {
inline constexpr double kLogitClamp = 1e-9;

inline double logit(double p) {
  p = std::clamp(p, kLogitClamp, 1.0 - kLogitClamp);
  return std::log(p / (1.0 - p));
}

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}  // namespace detail

// Effective power-up probability of every cell under `condition`.
inline Grid<double> apply_condition(const DeviceModel& device, const Condition& condition,
                                    const SimParams& params = {}) {
  if (device.bias.size() != device.rows * device.cols || device.rows == 0)
    throw DimensionError("invalid device model");
  if (!(condition.magnitude >= 0.0)) throw ParameterError("condition magnitude must be >= 0");
  const auto& coupling = params.for_condition(condition.kind);
  const double m = condition.magnitude;
  const double offset = coupling.shift * m;
  const double sens = params.sensitivity_scale * m * coupling.sensitivity;
  const double drift = condition.kind == ConditionKind::Aged ? params.aging_drift * m : 0.0;
  Grid<double> out = device.bias;
  if (offset == 0.0 && sens == 0.0 && drift == 0.0) return out;
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const double theta = device.bias[i];
    if (theta == 0.0 || theta == 1.0) continue;
    double z = detail::logit(theta) + offset + device.sensitivity[i] * sens;
    if (theta > 0.5) z += drift;
    if (theta < 0.5) z -= drift;
    out[i] = detail::logistic(z);
  }
  return out;
}

// Draws one power-up readout from an already conditioned bias field.
inline Measurement sample_from_effective(const DeviceModel& device,
                                         const Grid<double>& effective,
                                         const Condition& condition,
                                         std::uint64_t measurement_seed) {
  if (effective.rows() != device.rows || effective.cols() != device.cols)
    throw DimensionError("effective bias shape does not match device");
  Measurement m;
  m.device_id = device.device_id;
  m.condition = condition;
  m.measurement_seed = measurement_seed;
  m.bits = Grid<std::uint8_t>(device.rows, device.cols);
  const KeyedStream stream(derive_seed(
      device.seed, {3, static_cast<std::uint64_t>(condition.kind), measurement_seed}));
  const auto n = static_cast<std::int64_t>(effective.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto cell = static_cast<std::uint64_t>(i);
    const std::uint8_t charged = stream.uniform(cell) < effective[cell] ? 1 : 0;
    m.bits[cell] = device.polarity[cell] ? charged : static_cast<std::uint8_t>(1 - charged);
  }
  return m;
}

inline Measurement sample_measurement(const DeviceModel& device, const Condition& condition,
                                      std::uint64_t measurement_seed, const SimParams& params = {}) {
  return sample_from_effective(device, apply_condition(device, condition, params), condition,
                               measurement_seed);
}

// Everything needed to regenerate a dataset bit for bit.
struct DatasetSpec {
  std::uint32_t n_devices = 3;
  std::vector<Condition> conditions = {
      {ConditionKind::Nominal}, {ConditionKind::HighTemp}, {ConditionKind::LowTemp},
      {ConditionKind::HighVolt}, {ConditionKind::LowVolt}, {ConditionKind::Aged}};
  std::uint32_t per_condition = 10;
  std::size_t rows = 1024;
  std::size_t cols = 1024;
  std::uint64_t master_seed = 7;
  SimParams params;

  bool operator==(const DatasetSpec&) const = default;
};

inline void to_json(nlohmann::json& j, const DatasetSpec& s) {
  j = {{"n_devices", s.n_devices}, {"conditions", s.conditions},
       {"per_condition", s.per_condition}, {"rows", s.rows},
       {"cols", s.cols}, {"master_seed", s.master_seed},
       {"params", s.params}};
}

inline void from_json(const nlohmann::json& j, DatasetSpec& s) {
  s.n_devices = j.at("n_devices").get<std::uint32_t>();
  s.conditions = j.at("conditions").get<std::vector<Condition>>();
  s.per_condition = j.at("per_condition").get<std::uint32_t>();
  s.rows = j.at("rows").get<std::size_t>();
  s.cols = j.at("cols").get<std::size_t>();
  s.master_seed = j.at("master_seed").get<std::uint64_t>();
  s.params = j.value("params", SimParams{});
}

struct DeviceRecord {
  std::uint32_t device_id = 0;
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetSpec spec;
  std::vector<DeviceRecord> devices;
  std::vector<Measurement> measurements;  // device-major, then condition, then repeat
};

inline std::uint64_t device_seed(std::uint64_t master_seed, std::uint32_t device_id) {
  return derive_seed(master_seed, {1, device_id});
}

inline std::uint64_t measurement_seed(std::uint64_t master_seed, std::uint32_t device_id,
                                      std::size_t condition_index, std::uint32_t repeat) {
  return derive_seed(master_seed, {2, device_id, condition_index, repeat});
}

inline Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.n_devices == 0 || spec.conditions.empty() || spec.per_condition == 0)
    throw ParameterError("device, condition and per-condition counts must be >= 1");
  if (spec.rows == 0 || spec.cols == 0) throw DimensionError("dataset geometry must be >= 1");
  spec.params.validate();
  Dataset ds;
  ds.spec = spec;
  ds.measurements.reserve(std::size_t{spec.n_devices} * spec.conditions.size() * spec.per_condition);
  for (std::uint32_t d = 0; d < spec.n_devices; ++d) {
    const std::uint64_t seed = device_seed(spec.master_seed, d);
    ds.devices.push_back({d, seed});
    const DeviceModel dev = new_device(spec.rows, spec.cols, seed, spec.params, d);
    for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
      const Grid<double> eff = apply_condition(dev, spec.conditions[c], spec.params);
      for (std::uint32_t k = 0; k < spec.per_condition; ++k) {
        ds.measurements.push_back(sample_from_effective(
            dev, eff, spec.conditions[c], measurement_seed(spec.master_seed, d, c, k)));
      }
    }
  }
  return ds;
}

inline Dataset generate_dataset(std::uint32_t n_devices, std::vector<Condition> conditions,
                                std::uint32_t per_condition, std::size_t rows, std::size_t cols,
                                std::uint64_t master_seed, const SimParams& params = {}) {
  return generate_dataset(DatasetSpec{n_devices, std::move(conditions), per_condition, rows, cols,
                                      master_seed, params});
}

// --- Hamming diagnostics --------------------------------------------------

// Bits packed 64 per word for popcount comparisons.
inline std::vector<std::uint64_t> pack_words(const Grid<std::uint8_t>& bits) {
  std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return words;
}

inline double fractional_hamming(const Grid<std::uint8_t>& a, const Grid<std::uint8_t>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("measurement shapes differ");
  if (a.size() == 0) throw DimensionError("empty measurement");
  const auto wa = pack_words(a);
  const auto wb = pack_words(b);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < wa.size(); ++i) diff += std::popcount(wa[i] ^ wb[i]);
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

struct DistanceSummary {
  std::size_t pairs = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;

  bool empty() const { return pairs == 0; }
};

struct HammingReport {
  DistanceSummary intra;
  DistanceSummary inter;
};

inline HammingReport hamming_stats(std::span<const Measurement> measurements) {
  if (measurements.size() < 2) throw ParameterError("hamming_stats needs at least 2 measurements");
  const std::size_t cells = measurements.front().bits.size();
  std::vector<std::vector<std::uint64_t>> packed;
  packed.reserve(measurements.size());
  for (const auto& m : measurements) {
    if (m.bits.rows() != measurements.front().bits.rows() ||
        m.bits.cols() != measurements.front().bits.cols())
      throw DimensionError("measurement shapes differ");
    packed.push_back(pack_words(m.bits));
  }
  struct Acc {
    std::size_t n = 0;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    DistanceSummary finish() const {
      if (n == 0) return {};
      return {n, sum / static_cast<double>(n), lo, hi};
    }
  } intra, inter;
  for (std::size_t i = 0; i < packed.size(); ++i) {
    for (std::size_t j = i + 1; j < packed.size(); ++j) {
      std::size_t diff = 0;
      for (std::size_t w = 0; w < packed[i].size(); ++w) diff += std::popcount(packed[i][w] ^ packed[j][w]);
      const double d = static_cast<double>(diff) / static_cast<double>(cells);
      Acc& acc = measurements[i].device_id == measurements[j].device_id ? intra : inter;
      ++acc.n;
      acc.sum += d;
      acc.lo = std::min(acc.lo, d);
      acc.hi = std::max(acc.hi, d);
    }
  }
  return {intra.finish(), inter.finish()};
}

inline HammingReport hamming_stats(const Dataset& ds) { return hamming_stats(ds.measurements); }

inline void to_json(nlohmann::json& j, const DistanceSummary& s) {
  if (s.empty()) {
    j = {{"pairs", 0}, {"empty", true}};
  } else {
    j = {{"pairs", s.pairs}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"empty", false}};
  }
}

inline void to_json(nlohmann::json& j, const HammingReport& r) {
  j = {{"intra", r.intra}, {"inter", r.inter}};
}

}  // namespace dramnet::sim
