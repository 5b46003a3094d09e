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

// Binary greymap (P5, maxval 255) reader and writer.

#pragma once

#include <cctype>
#include <filesystem>
#include <string>
#include <vector>

#include "dramnet/dataset_io.hpp"
#include "dramnet/errors.hpp"
#include "dramnet/imaging.hpp"

namespace dramnet::imaging {

inline std::vector<std::uint8_t> encode_pgm(const FingerprintImage& img) {
  const std::string header =
      "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

namespace detail {
class PgmCursor {
 public:
  explicit PgmCursor(const std::vector<std::uint8_t>& b) : bytes_(b) {}

  // Skips whitespace and '#' comments, then reads an unsigned decimal.
  std::size_t number(const char* what) {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw FormatError(std::string("PGM header: expected ") + what);
    std::size_t v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > (1u << 30)) throw FormatError(std::string("PGM header: ") + what + " too large");
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance() { ++pos_; }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 2;
};
}  // namespace detail

inline FingerprintImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("not a binary PGM (expected magic P5)");
  detail::PgmCursor cur(bytes);
  const std::size_t cols = cur.number("width");
  const std::size_t rows = cur.number("height");
  const std::size_t maxval = cur.number("maxval");
  if (rows == 0 || cols == 0) throw FormatError("PGM header: zero dimension");
  if (maxval != 255) throw FormatError("PGM maxval must be 255");
  if (cur.pos() >= bytes.size() || !std::isspace(bytes[cur.pos()]))
    throw FormatError("PGM header: missing separator before raster");
  cur.advance();
  if (bytes.size() - cur.pos() != rows * cols) throw FormatError("PGM raster size does not match header");
  FingerprintImage img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(cur.pos()), bytes.end());
  return img;
}

inline void export_pgm(const FingerprintImage& img, const std::filesystem::path& path) {
  io::write_file_bytes(path, encode_pgm(img));
}

inline FingerprintImage import_pgm(const std::filesystem::path& path) {
  return decode_pgm(io::read_file_bytes(path));
}

}  // namespace dramnet::imaging
