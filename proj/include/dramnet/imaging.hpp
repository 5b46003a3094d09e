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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dramnet/dram_sim.hpp"
#include "dramnet/errors.hpp"

namespace dramnet::imaging {

enum class CropTag : std::uint8_t { TopLeft, TopRight, BottomLeft, BottomRight, Center, Full };

inline constexpr std::array<CropTag, 6> kCropOrder = {
    CropTag::TopLeft, CropTag::TopRight, CropTag::BottomLeft,
    CropTag::BottomRight, CropTag::Center, CropTag::Full};

inline constexpr std::string_view crop_tag_name(CropTag t) {
  switch (t) {
    case CropTag::TopLeft: return "tl";
    case CropTag::TopRight: return "tr";
    case CropTag::BottomLeft: return "bl";
    case CropTag::BottomRight: return "br";
    case CropTag::Center: return "c";
    case CropTag::Full: return "full";
  }
  return "?";
}

inline CropTag parse_crop_tag(std::string_view s) {
  for (CropTag t : kCropOrder) {
    if (crop_tag_name(t) == s) return t;
  }
  throw ParameterError("unknown crop tag '" + std::string(s) + "'");
}

struct Provenance {
  std::uint64_t measurement_seed = 0;
  CropTag crop = CropTag::Full;

  bool operator==(const Provenance&) const = default;
};

struct FingerprintImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // row-major
  std::uint32_t label = 0;
  Provenance source;

  std::uint8_t at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  std::uint8_t& at(std::size_t r, std::size_t c) { return pixels[r * cols + c]; }

  bool operator==(const FingerprintImage&) const = default;
};

template <typename T>
struct NormalizedInput {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 1;
  std::vector<T> values;
};

inline FingerprintImage blank_like(const FingerprintImage& src, std::size_t rows, std::size_t cols) {
  FingerprintImage out;
  out.rows = rows;
  out.cols = cols;
  out.pixels.assign(rows * cols, 0);
  out.label = src.label;
  out.source = src.source;
  return out;
}

// bit 0 -> 0, bit 1 -> 255.
inline FingerprintImage to_image(const sim::Measurement& m) {
  FingerprintImage img;
  img.rows = m.bits.rows();
  img.cols = m.bits.cols();
  img.label = m.device_id;
  img.source = {m.measurement_seed, CropTag::Full};
  img.pixels.resize(m.bits.size());
  for (std::size_t i = 0; i < m.bits.size(); ++i) img.pixels[i] = m.bits[i] ? 255 : 0;
  return img;
}

inline Grid<std::uint8_t> threshold_bits(const FingerprintImage& img) {
  Grid<std::uint8_t> bits(img.rows, img.cols);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) bits[i] = img.pixels[i] >= 128 ? 1 : 0;
  return bits;
}

// Block-mean pooling over non-overlapping blocks, rounded half up.
inline FingerprintImage downscale(const FingerprintImage& img, std::size_t target_rows,
                                  std::size_t target_cols) {
  if (target_rows == 0 || target_cols == 0 || img.rows % target_rows != 0 ||
      img.cols % target_cols != 0)
    throw DimensionError("downscale target " + std::to_string(target_rows) + "x" +
                         std::to_string(target_cols) + " does not divide " +
                         std::to_string(img.rows) + "x" + std::to_string(img.cols));
  const std::size_t br = img.rows / target_rows;
  const std::size_t bc = img.cols / target_cols;
  if (br == 1 && bc == 1) return img;
  const std::uint64_t area = br * bc;
  FingerprintImage out = blank_like(img, target_rows, target_cols);
  std::vector<std::uint64_t> sums(target_cols);
  for (std::size_t orow = 0; orow < target_rows; ++orow) {
    std::fill(sums.begin(), sums.end(), 0);
    for (std::size_t r = orow * br; r < (orow + 1) * br; ++r) {
      const std::uint8_t* src = img.pixels.data() + r * img.cols;
      for (std::size_t c = 0; c < img.cols; ++c) sums[c / bc] += src[c];
    }
    // floor(sum / area + 1/2) in integers
    for (std::size_t oc = 0; oc < target_cols; ++oc)
      out.at(orow, oc) = static_cast<std::uint8_t>((2 * sums[oc] + area) / (2 * area));
  }
  return out;
}

// Resize to (rows, cols): block mean when the source is an integer multiple
// of the target, nearest neighbour otherwise.
inline FingerprintImage resize(const FingerprintImage& img, std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw DimensionError("resize target must be non-empty");
  if (img.rows == rows && img.cols == cols) return img;
  if (img.rows % rows == 0 && img.cols % cols == 0) return downscale(img, rows, cols);
  FingerprintImage out = blank_like(img, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t sr = r * img.rows / rows;
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = img.at(sr, c * img.cols / cols);
  }
  return out;
}

inline FingerprintImage crop(const FingerprintImage& img, std::size_t top, std::size_t left,
                             std::size_t rows, std::size_t cols) {
  if (top + rows > img.rows || left + cols > img.cols || rows == 0 || cols == 0)
    throw DimensionError("crop window outside image");
  FingerprintImage out = blank_like(img, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(img.pixels.begin() + static_cast<std::ptrdiff_t>((top + r) * img.cols + left), cols,
                out.pixels.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return out;
}

// Four corner crops, a centre crop and the original, each resized back to
// the source dimensions. Order follows kCropOrder.
inline std::vector<FingerprintImage> six_crops(const FingerprintImage& img, double fraction = 0.875) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ParameterError("crop fraction must be in (0, 1]");
  if (img.rows == 0 || img.cols == 0) throw DimensionError("empty image");
  const auto scaled = [fraction](std::size_t dim) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(dim))));
  };
  const std::size_t ch = scaled(img.rows);
  const std::size_t cw = scaled(img.cols);
  const std::size_t bottom = img.rows - ch;
  const std::size_t right = img.cols - cw;
  std::vector<FingerprintImage> out;
  out.reserve(6);
  for (CropTag tag : kCropOrder) {
    FingerprintImage piece;
    switch (tag) {
      case CropTag::TopLeft: piece = crop(img, 0, 0, ch, cw); break;
      case CropTag::TopRight: piece = crop(img, 0, right, ch, cw); break;
      case CropTag::BottomLeft: piece = crop(img, bottom, 0, ch, cw); break;
      case CropTag::BottomRight: piece = crop(img, bottom, right, ch, cw); break;
      case CropTag::Center: piece = crop(img, bottom / 2, right / 2, ch, cw); break;
      case CropTag::Full: piece = img; break;
    }
    piece = resize(piece, img.rows, img.cols);
    piece.source.crop = tag;
    out.push_back(std::move(piece));
  }
  return out;
}

template <typename T = float>
NormalizedInput<T> normalize(const FingerprintImage& img) {
  NormalizedInput<T> out;
  out.height = img.rows;
  out.width = img.cols;
  out.values.resize(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    out.values[i] = static_cast<T>(img.pixels[i]) / static_cast<T>(255);
  return out;
}

}  // namespace dramnet::imaging
