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

// Model file layout (little endian):
//   "DRNW", version u8,
//   u32 length + UTF-8 JSON {"architecture": ..., "init_seed": ...},
//   then for every stored array in Model::stored_arrays() order:
//   u64 element count + that many float32 values.

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dramnet/dataset_io.hpp"
#include "dramnet/errors.hpp"
#include "dramnet/model.hpp"

namespace dramnet::nn {

inline constexpr char kModelMagic[4] = {'D', 'R', 'N', 'W'};
inline constexpr std::uint8_t kModelVersion = 1;

namespace detail {
class ByteWriter {
 public:
  void raw(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes.insert(bytes.end(), b, b + n);
  }
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> bytes;
};

class ByteReader {
 public:
  explicit ByteReader(const std::vector<std::uint8_t>& b) : bytes_(b) {}
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw FormatError("model file truncated");
  }
  template <typename U>
  U le() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(bytes_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                  bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};
}  // namespace detail

template <typename T>
std::vector<std::uint8_t> encode_model(const Model<T>& model) {
  detail::ByteWriter w;
  w.raw(kModelMagic, 4);
  w.le<std::uint8_t>(kModelVersion);
  const nlohmann::json header = {{"architecture", model.architecture()}, {"init_seed", model.init_seed()}};
  const std::string text = header.dump();
  w.le<std::uint32_t>(static_cast<std::uint32_t>(text.size()));
  w.raw(text.data(), text.size());
  for (const Tensor<T>* t : model.stored_arrays()) {
    w.le<std::uint64_t>(t->size());
    for (T v : t->values()) w.le<std::uint32_t>(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return std::move(w.bytes);
}

template <typename T>
Model<T> decode_model(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader r(bytes);
  if (r.str(4) != std::string(kModelMagic, 4)) throw FormatError("not a DRNW model file");
  if (r.le<std::uint8_t>() != kModelVersion) throw FormatError("unsupported DRNW version");
  const auto len = r.le<std::uint32_t>();
  nlohmann::json header;
  ArchitectureSpec arch;
  std::uint64_t seed = 0;
  try {
    header = nlohmann::json::parse(r.str(len));
    arch = header.at("architecture").get<ArchitectureSpec>();
    seed = header.at("init_seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model header: ") + e.what());
  }
  Model<T> model = Model<T>::build(arch, seed);
  for (Tensor<T>* t : model.stored_arrays()) {
    const auto n = r.le<std::uint64_t>();
    if (n != t->size()) throw FormatError("model array length does not match architecture");
    for (std::size_t i = 0; i < n; ++i) (*t)[i] = static_cast<T>(std::bit_cast<float>(r.le<std::uint32_t>()));
  }
  if (!r.done()) throw FormatError("trailing bytes after model arrays");
  return model;
}

template <typename T>
void save_model(const Model<T>& model, const std::filesystem::path& path) {
  io::write_file_bytes(path, encode_model(model));
}

template <typename T = float>
Model<T> load_model(const std::filesystem::path& path) {
  return decode_model<T>(io::read_file_bytes(path));
}

}  // namespace dramnet::nn
