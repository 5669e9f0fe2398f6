// Copyright 2026 The SLIMD Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Code tensors, the spatial tile grid laid over them, and tile histograms.
//
// A tensor is height x width x channels integer codes stored (y, x, z)
// row-major with the channel index innermost. Tiles are square spatial
// regions of one channel; tiles on the bottom and right edges are truncated
// rather than padded. The canonical tile order is channel-major, then
// row-major over the tile grid, and every consumer of tiles (side
// information, payload order) relies on it.

#ifndef SLIMD_TENSOR_HPP_
#define SLIMD_TENSOR_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slimd/error.hpp"

namespace slimd {

inline constexpr uint32_t kMaxAlphabetSize = 65536;

// Inclusive integer range [lo, hi] of admissible codes.
struct Alphabet {
  int32_t lo = 0;
  int32_t hi = 0;

  uint32_t size() const {
    return static_cast<uint32_t>(int64_t{hi} - int64_t{lo} + 1);
  }
  bool contains(int64_t v) const { return v >= lo && v <= hi; }
  uint32_t index(int32_t v) const {
    return static_cast<uint32_t>(int64_t{v} - int64_t{lo});
  }
  int32_t symbol(uint32_t index) const {
    return static_cast<int32_t>(int64_t{lo} + index);
  }

  bool operator==(const Alphabet&) const = default;

  static Alphabet Checked(int64_t lo, int64_t hi) {
    Require(lo <= hi, "alphabet lo must not exceed hi");
    Require(lo >= INT32_MIN && hi <= INT32_MAX, "alphabet bounds exceed 32 bits");
    Require(hi - lo + 1 <= kMaxAlphabetSize, "alphabet larger than 65536 symbols");
    return Alphabet{static_cast<int32_t>(lo), static_cast<int32_t>(hi)};
  }
};

inline std::string ToString(const Alphabet& a) {
  return "[" + std::to_string(a.lo) + ", " + std::to_string(a.hi) + "]";
}

class CodeTensor {
 public:
  CodeTensor() = default;

  CodeTensor(uint32_t height, uint32_t width, uint32_t channels, Alphabet alphabet,
             std::vector<int32_t> values)
      : height_(height),
        width_(width),
        channels_(channels),
        alphabet_(Alphabet::Checked(alphabet.lo, alphabet.hi)),
        values_(std::move(values)) {
    Require(height >= 1 && width >= 1 && channels >= 1,
            "tensor dimensions must be positive");
    Require(values_.size() == cell_count(), "value count does not match dimensions");
    for (size_t i = 0; i < values_.size(); ++i) {
      if (!alphabet_.contains(values_[i])) {
        const size_t z = i % channels_;
        const size_t x = (i / channels_) % width_;
        const size_t y = i / (size_t{channels_} * width_);
        Fail(ErrorKind::kOutOfAlphabet,
             "value " + std::to_string(values_[i]) + " at (y=" + std::to_string(y) +
                 ", x=" + std::to_string(x) + ", z=" + std::to_string(z) +
                 ") outside alphabet " + ToString(alphabet_));
      }
    }
  }

  // Tensor with every cell set to `fill`.
  static CodeTensor Filled(uint32_t height, uint32_t width, uint32_t channels,
                           Alphabet alphabet, int32_t fill) {
    return CodeTensor(height, width, channels, alphabet,
                      std::vector<int32_t>(size_t{height} * width * channels, fill));
  }

  uint32_t height() const { return height_; }
  uint32_t width() const { return width_; }
  uint32_t channels() const { return channels_; }
  const Alphabet& alphabet() const { return alphabet_; }
  size_t cell_count() const { return size_t{height_} * width_ * channels_; }
  std::span<const int32_t> values() const { return values_; }

  size_t offset(uint32_t y, uint32_t x, uint32_t z) const {
    return (size_t{y} * width_ + x) * channels_ + z;
  }
  int32_t at(uint32_t y, uint32_t x, uint32_t z) const { return values_[offset(y, x, z)]; }

  bool operator==(const CodeTensor&) const = default;

 private:
  uint32_t height_ = 0;
  uint32_t width_ = 0;
  uint32_t channels_ = 0;
  Alphabet alphabet_;
  std::vector<int32_t> values_;
};

// Tile grid dimensions for a given tile size.
struct TileGrid {
  uint32_t rows = 0;
  uint32_t cols = 0;
  uint32_t tile_size = 0;
  uint32_t channels = 0;

  TileGrid() = default;
  TileGrid(uint32_t height, uint32_t width, uint32_t channels, uint32_t tile_size)
      : tile_size(tile_size), channels(channels) {
    Require(tile_size >= 1, "tile_size must be at least 1");
    rows = static_cast<uint32_t>((uint64_t{height} + tile_size - 1) / tile_size);
    cols = static_cast<uint32_t>((uint64_t{width} + tile_size - 1) / tile_size);
  }
  TileGrid(const CodeTensor& t, uint32_t tile_size)
      : TileGrid(t.height(), t.width(), t.channels(), tile_size) {}

  size_t tiles_per_channel() const { return size_t{rows} * cols; }
  size_t tile_count() const { return tiles_per_channel() * channels; }
  // Position of tile (ty, tx, z) in canonical order.
  size_t ordinal(uint32_t ty, uint32_t tx, uint32_t z) const {
    return size_t{z} * tiles_per_channel() + size_t{ty} * cols + tx;
  }
};

struct Tile {
  uint32_t y = 0;  // tile grid row
  uint32_t x = 0;  // tile grid column
  uint32_t z = 0;  // channel
  uint32_t origin_y = 0;
  uint32_t origin_x = 0;
  uint32_t rows = 0;  // cells covered; smaller than tile_size on the edges
  uint32_t cols = 0;
  std::vector<int32_t> codes;  // row-major within the tile

  size_t n() const { return codes.size(); }
};

// Codes of one tile, in row-major order within the tile.
inline Tile ExtractTile(const CodeTensor& t, const TileGrid& grid, uint32_t ty,
                        uint32_t tx, uint32_t z) {
  Tile tile;
  tile.y = ty;
  tile.x = tx;
  tile.z = z;
  tile.origin_y = ty * grid.tile_size;
  tile.origin_x = tx * grid.tile_size;
  tile.rows = std::min(grid.tile_size, t.height() - tile.origin_y);
  tile.cols = std::min(grid.tile_size, t.width() - tile.origin_x);
  tile.codes.reserve(size_t{tile.rows} * tile.cols);
  for (uint32_t dy = 0; dy < tile.rows; ++dy) {
    for (uint32_t dx = 0; dx < tile.cols; ++dx) {
      tile.codes.push_back(t.at(tile.origin_y + dy, tile.origin_x + dx, z));
    }
  }
  return tile;
}

// All tiles in canonical order (channel-major, then row-major over the grid).
inline std::vector<Tile> TilePartition(const CodeTensor& t, uint32_t tile_size) {
  if (tile_size == 0) Fail(ErrorKind::kInvalidArgument, "tile_size must be at least 1");
  const TileGrid grid(t, tile_size);
  std::vector<Tile> tiles;
  tiles.reserve(grid.tile_count());
  for (uint32_t z = 0; z < t.channels(); ++z) {
    for (uint32_t ty = 0; ty < grid.rows; ++ty) {
      for (uint32_t tx = 0; tx < grid.cols; ++tx) {
        tiles.push_back(ExtractTile(t, grid, ty, tx, z));
      }
    }
  }
  return tiles;
}

class Histogram {
 public:
  explicit Histogram(uint32_t alphabet_size) : counts_(alphabet_size, 0) {}
  explicit Histogram(std::vector<uint64_t> counts) : counts_(std::move(counts)) {
    for (uint64_t c : counts_) total_ += c;
  }

  void Add(uint32_t index, uint64_t count = 1) {
    counts_[index] += count;
    total_ += count;
  }

  std::span<const uint64_t> counts() const { return counts_; }
  uint64_t operator[](size_t i) const { return counts_[i]; }
  uint64_t total() const { return total_; }
  size_t size() const { return counts_.size(); }

  std::vector<double> Normalized() const {
    Require(total_ >= 1, "cannot normalize an empty histogram");
    std::vector<double> q(counts_.size());
    const double inv = 1.0 / static_cast<double>(total_);
    for (size_t i = 0; i < q.size(); ++i) q[i] = static_cast<double>(counts_[i]) * inv;
    return q;
  }

 private:
  std::vector<uint64_t> counts_;
  uint64_t total_ = 0;
};

inline Histogram TileHistogram(const Tile& tile, const Alphabet& alphabet) {
  Histogram h(alphabet.size());
  for (size_t i = 0; i < tile.codes.size(); ++i) {
    const int32_t v = tile.codes[i];
    if (!alphabet.contains(v)) {
      const size_t y = tile.origin_y + i / tile.cols;
      const size_t x = tile.origin_x + i % tile.cols;
      Fail(ErrorKind::kOutOfAlphabet,
           "code " + std::to_string(v) + " at (y=" + std::to_string(y) + ", x=" +
               std::to_string(x) + ", z=" + std::to_string(tile.z) +
               ") outside alphabet " + ToString(alphabet));
    }
    h.Add(alphabet.index(v));
  }
  return h;
}

}  // namespace slimd

#endif  // SLIMD_TENSOR_HPP_
