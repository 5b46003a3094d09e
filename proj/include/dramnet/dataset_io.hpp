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

// On-disk dataset layout.
//
//   <dir>/manifest.json   geometry, simulator params, seeds, one record per file
//   <dir>/m_00000.bin     one power-up readout each
//
// .bin layout (little endian):
//   0..3   "DRNF"
//   4      version (1)
//   5..8   rows  u32
//   9..12  cols  u32
//   13..15 zero
//   16..   row-major bits, 8 per byte, MSB first, each row padded to a byte

#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/dram_sim.hpp"
#include "dramnet/errors.hpp"

namespace dramnet::io {

inline constexpr std::array<char, 4> kMeasurementMagic = {'D', 'R', 'N', 'F'};
inline constexpr std::uint8_t kMeasurementVersion = 1;
inline constexpr std::size_t kMeasurementHeaderSize = 16;

namespace detail {
inline void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t{in[at + i]} << (8 * i);
  return v;
}
}  // namespace detail

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

inline void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<std::uint8_t> encode_bits(const Grid<std::uint8_t>& bits) {
  const std::size_t row_bytes = (bits.cols() + 7) / 8;
  std::vector<std::uint8_t> out(kMeasurementHeaderSize + row_bytes * bits.rows(), 0);
  std::copy(kMeasurementMagic.begin(), kMeasurementMagic.end(), out.begin());
  out[4] = kMeasurementVersion;
  detail::put_u32(out, 5, static_cast<std::uint32_t>(bits.rows()));
  detail::put_u32(out, 9, static_cast<std::uint32_t>(bits.cols()));
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    std::uint8_t* row = out.data() + kMeasurementHeaderSize + r * row_bytes;
    for (std::size_t c = 0; c < bits.cols(); ++c) {
      if (bits(r, c)) row[c / 8] |= static_cast<std::uint8_t>(0x80u >> (c % 8));
    }
  }
  return out;
}

inline Grid<std::uint8_t> decode_bits(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kMeasurementHeaderSize ||
      !std::equal(kMeasurementMagic.begin(), kMeasurementMagic.end(), bytes.begin()))
    throw FormatError("not a DRNF measurement");
  if (bytes[4] != kMeasurementVersion) throw FormatError("unsupported DRNF version");
  const std::size_t rows = detail::get_u32(bytes, 5);
  const std::size_t cols = detail::get_u32(bytes, 9);
  if (rows == 0 || cols == 0) throw FormatError("DRNF header has zero dimension");
  const std::size_t row_bytes = (cols + 7) / 8;
  if (bytes.size() != kMeasurementHeaderSize + row_bytes * rows)
    throw FormatError("DRNF payload size does not match header");
  Grid<std::uint8_t> bits(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::uint8_t* row = bytes.data() + kMeasurementHeaderSize + r * row_bytes;
    for (std::size_t c = 0; c < cols; ++c) bits(r, c) = (row[c / 8] >> (7 - c % 8)) & 1u;
  }
  return bits;
}

inline void write_measurement(const std::filesystem::path& path, const Grid<std::uint8_t>& bits) {
  write_file_bytes(path, encode_bits(bits));
}

inline Grid<std::uint8_t> read_measurement(const std::filesystem::path& path) {
  return decode_bits(read_file_bytes(path));
}

struct MeasurementRecord {
  std::uint32_t device_id = 0;
  sim::Condition condition;
  std::uint64_t seed = 0;
  std::string file;
};

struct Manifest {
  sim::DatasetSpec spec;
  std::vector<sim::DeviceRecord> devices;
  std::vector<MeasurementRecord> records;
};

inline std::string measurement_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "m_%05zu.bin", index);
  return buf;
}

inline nlohmann::json manifest_json(const Manifest& m) {
  nlohmann::json devices = nlohmann::json::array();
  for (const auto& d : m.devices) devices.push_back({{"device_id", d.device_id}, {"seed", d.seed}});
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : m.records) {
    records.push_back({{"device_id", r.device_id}, {"condition", r.condition},
                       {"seed", r.seed}, {"file", r.file}});
  }
  return {{"format", "dramnet-dataset"}, {"version", 1}, {"spec", m.spec},
          {"devices", devices}, {"measurements", records}};
}

inline Manifest make_manifest(const sim::Dataset& ds) {
  Manifest m{ds.spec, ds.devices, {}};
  for (std::size_t i = 0; i < ds.measurements.size(); ++i) {
    const auto& meas = ds.measurements[i];
    m.records.push_back({meas.device_id, meas.condition, meas.measurement_seed,
                         measurement_file_name(i)});
  }
  return m;
}

inline Manifest read_manifest(const std::filesystem::path& dir) {
  const auto bytes = read_file_bytes(dir / "manifest.json");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
  try {
    if (j.value("format", "") != "dramnet-dataset") throw FormatError("manifest.json: wrong format tag");
    Manifest m;
    m.spec = j.at("spec").get<sim::DatasetSpec>();
    for (const auto& d : j.at("devices")) {
      m.devices.push_back({d.at("device_id").get<std::uint32_t>(), d.at("seed").get<std::uint64_t>()});
    }
    for (const auto& r : j.at("measurements")) {
      m.records.push_back({r.at("device_id").get<std::uint32_t>(),
                           r.at("condition").get<sim::Condition>(),
                           r.at("seed").get<std::uint64_t>(), r.at("file").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("manifest.json: ") + e.what());
  }
}

// Writes the manifest plus one .bin per measurement; returns the manifest.
inline Manifest write_dataset(const sim::Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  Manifest m = make_manifest(ds);
  for (std::size_t i = 0; i < ds.measurements.size(); ++i) {
    write_measurement(dir / m.records[i].file, ds.measurements[i].bits);
  }
  write_text_file(dir / "manifest.json", manifest_json(m).dump(2) + "\n");
  return m;
}

inline sim::Dataset read_dataset(const std::filesystem::path& dir) {
  const Manifest m = read_manifest(dir);
  sim::Dataset ds;
  ds.spec = m.spec;
  ds.devices = m.devices;
  ds.measurements.reserve(m.records.size());
  for (const auto& r : m.records) {
    sim::Measurement meas;
    meas.device_id = r.device_id;
    meas.condition = r.condition;
    meas.measurement_seed = r.seed;
    meas.bits = read_measurement(dir / r.file);
    ds.measurements.push_back(std::move(meas));
  }
  return ds;
}

}  // namespace dramnet::io
