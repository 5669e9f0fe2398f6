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

// Whole-tensor encode/decode and the bitstream container.
//
// Bitstream, version 1 (little-endian):
//
//   offset  size  field
//        0     4  "SLIB"
//        4     2  version (= 1)
//        6    12  height, width, channels (u32)
//       18     8  alphabet lo, hi (i32)
//       26     2  tile_size (u16); 0 marks a global-model stream
//       28     4  inclusion threshold in millionths (u32)
//       32     8  dictionary digest (u64)
//       40    12  section lengths: indices, customs, payload (u32)
//       52     -  index section: raw DEFLATE of one byte per tile in
//                 canonical order (channel-major, row-major over the grid)
//              -  custom section: raw DEFLATE of
//                   u32 channel count, then per channel
//                   u8 present; if present: i32 first, i32 last,
//                   (last - first + 1) u8 weights
//              -  payload: range-coded codes, tile by tile in canonical
//                 order, row-major within each tile
//        end   4  CRC-32 of every preceding byte
//
// Global-model streams (tile_size 0) have empty index and custom sections
// and code every cell, channel-major then row-major, under dictionary
// model 0.

#ifndef SLIMD_CONTAINER_HPP_
#define SLIMD_CONTAINER_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slimd/byte_io.hpp"
#include "slimd/deflate.hpp"
#include "slimd/dictionary.hpp"
#include "slimd/error.hpp"
#include "slimd/model_select.hpp"
#include "slimd/range_coder.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

inline constexpr uint16_t kBitstreamVersion = 1;
inline constexpr size_t kBitstreamHeaderBytes = 52;
inline constexpr size_t kBitstreamTrailerBytes = 4;
inline constexpr uint32_t kMaxTileSize = 65535;
inline constexpr uint64_t kMaxBitstreamCells = uint64_t{1} << 34;

struct BitstreamHeader {
  uint16_t version = kBitstreamVersion;
  uint32_t height = 0;
  uint32_t width = 0;
  uint32_t channels = 0;
  Alphabet alphabet;
  uint16_t tile_size = 0;
  uint32_t threshold_micros = 0;
  uint64_t dictionary_digest = 0;
  uint32_t index_bytes = 0;
  uint32_t custom_bytes = 0;
  uint32_t payload_bytes = 0;

  bool global_model() const { return tile_size == 0; }
  size_t total_bytes() const {
    return kBitstreamHeaderBytes + size_t{index_bytes} + custom_bytes + payload_bytes +
           kBitstreamTrailerBytes;
  }
};

struct Bitstream {
  Bytes bytes;
  // Planner output, present on freshly encoded streams only.
  std::optional<TilePlan> plan;
};

// Validates framing and the CRC trailer, then parses the header. Needs no
// dictionary.
inline BitstreamHeader ParseHeader(std::span<const uint8_t> bytes) {
  if (bytes.size() < kBitstreamHeaderBytes + kBitstreamTrailerBytes) {
    Fail(ErrorKind::kFormat, "bitstream truncated: " + std::to_string(bytes.size()) +
                                 " bytes is shorter than header and trailer");
  }
  const size_t body = bytes.size() - kBitstreamTrailerBytes;
  ByteReader trailer(bytes.subspan(body));
  if (trailer.U32() != Crc32(bytes.first(body))) {
    Fail(ErrorKind::kCorruption, "bitstream checksum mismatch");
  }
  ByteReader r(bytes);
  r.ExpectTag("SLIB");
  BitstreamHeader h;
  h.version = r.U16();
  if (h.version != kBitstreamVersion) {
    Fail(ErrorKind::kFormat, "unsupported bitstream version " + std::to_string(h.version));
  }
  h.height = r.U32();
  h.width = r.U32();
  h.channels = r.U32();
  h.alphabet.lo = r.I32();
  h.alphabet.hi = r.I32();
  h.tile_size = r.U16();
  h.threshold_micros = r.U32();
  h.dictionary_digest = r.U64();
  h.index_bytes = r.U32();
  h.custom_bytes = r.U32();
  h.payload_bytes = r.U32();
  if (h.height == 0 || h.width == 0 || h.channels == 0) {
    Fail(ErrorKind::kFormat, "zero dimension in bitstream header");
  }
  if (uint64_t{h.height} * h.width > kMaxBitstreamCells / h.channels) {
    Fail(ErrorKind::kFormat, "bitstream dimensions exceed " +
                                 std::to_string(kMaxBitstreamCells) + " cells");
  }
  if (h.alphabet.lo > h.alphabet.hi ||
      int64_t{h.alphabet.hi} - h.alphabet.lo + 1 > kMaxAlphabetSize) {
    Fail(ErrorKind::kFormat, "invalid alphabet in bitstream header");
  }
  if (h.total_bytes() != bytes.size()) {
    Fail(ErrorKind::kFormat, "section lengths sum to " + std::to_string(h.total_bytes()) +
                                 " bytes but the stream has " +
                                 std::to_string(bytes.size()));
  }
  if (h.global_model() && (h.index_bytes != 0 || h.custom_bytes != 0)) {
    Fail(ErrorKind::kFormat, "global-model stream carries side information");
  }
  return h;
}

inline void WriteHeader(ByteWriter& w, const BitstreamHeader& h) {
  w.Tag("SLIB");
  w.U16(h.version);
  w.U32(h.height);
  w.U32(h.width);
  w.U32(h.channels);
  w.I32(h.alphabet.lo);
  w.I32(h.alphabet.hi);
  w.U16(h.tile_size);
  w.U32(h.threshold_micros);
  w.U64(h.dictionary_digest);
  w.U32(h.index_bytes);
  w.U32(h.custom_bytes);
  w.U32(h.payload_bytes);
}

inline Bytes SerializeCustomBlock(std::span<const std::optional<QuantizedDist>> custom) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(custom.size()));
  for (const auto& c : custom) {
    w.U8(c ? 1 : 0);
    if (!c) continue;
    w.I32(c->first);
    w.I32(c->last);
    w.Raw(c->weights);
  }
  return w.Take();
}

inline std::vector<std::optional<QuantizedDist>> ParseCustomBlock(
    std::span<const uint8_t> raw, uint32_t channels, const Alphabet& alphabet) {
  ByteReader r(raw);
  const uint32_t count = r.U32();
  if (count != channels) {
    Fail(ErrorKind::kFormat, "custom block lists " + std::to_string(count) +
                                 " channels, header has " + std::to_string(channels));
  }
  std::vector<std::optional<QuantizedDist>> out(channels);
  for (uint32_t z = 0; z < channels; ++z) {
    const uint8_t present = r.U8();
    if (present > 1) Fail(ErrorKind::kFormat, "bad custom presence flag");
    if (!present) continue;
    QuantizedDist qd;
    qd.first = r.I32();
    qd.last = r.I32();
    if (qd.first > qd.last || !alphabet.contains(qd.first) || !alphabet.contains(qd.last)) {
      Fail(ErrorKind::kFormat, "custom span of channel " + std::to_string(z) +
                                   " outside alphabet");
    }
    const auto w = r.Raw(static_cast<size_t>(int64_t{qd.last} - qd.first + 1), "weights");
    qd.weights.assign(w.begin(), w.end());
    bool any = false;
    for (uint8_t v : qd.weights) any |= v != 0;
    if (!any) Fail(ErrorKind::kFormat, "custom weights of channel " + std::to_string(z) +
                                           " are all zero");
    out[z] = std::move(qd);
  }
  if (r.remaining() != 0) Fail(ErrorKind::kFormat, "trailing bytes in custom block");
  return out;
}

namespace internal {

inline uint32_t ThresholdMicros(double threshold) {
  Require(threshold >= 0.0 && threshold <= 4294.0, "threshold out of range");
  return static_cast<uint32_t>(std::llround(threshold * 1e6));
}

inline Bytes Assemble(BitstreamHeader h, std::span<const uint8_t> indices,
                      std::span<const uint8_t> customs, std::span<const uint8_t> payload) {
  h.index_bytes = static_cast<uint32_t>(indices.size());
  h.custom_bytes = static_cast<uint32_t>(customs.size());
  h.payload_bytes = static_cast<uint32_t>(payload.size());
  ByteWriter w;
  WriteHeader(w, h);
  w.Raw(indices);
  w.Raw(customs);
  w.Raw(payload);
  w.U32(Crc32(w.bytes()));
  return w.Take();
}

}  // namespace internal

struct EncodeOptions {
  uint32_t tile_size = 16;
  PlanOptions plan;
  // Emit the global stream under dictionary entry 0 when it is strictly
  // smaller than the tiled stream.
  bool global_fallback = true;
};

inline Bitstream EncodeGlobalBaseline(const CodeTensor& t, const Dictionary& global);

inline Bitstream EncodeImage(const CodeTensor& t, const Dictionary& dict,
                             const EncodeOptions& options = {}) {
  Require(dict.size() >= 1, "dictionary has no models");
  Require(t.alphabet() == dict.alphabet(), "tensor alphabet " + ToString(t.alphabet()) +
                                               " differs from dictionary alphabet " +
                                               ToString(dict.alphabet()));
  Require(options.tile_size >= 1 && options.tile_size <= kMaxTileSize,
          "tile_size must be in 1..65535");
  TilePlan plan = PlanImage(t, dict, options.tile_size, options.plan);

  std::vector<std::optional<CdfTable>> custom_tables(t.channels());
  for (uint32_t z = 0; z < t.channels(); ++z) {
    if (plan.custom[z]) custom_tables[z] = CustomTable(*plan.custom[z], dict.alphabet());
  }
  const Alphabet& alphabet = dict.alphabet();
  const TileGrid& grid = plan.grid;
  RangeEncoder enc;
  size_t ordinal = 0;
  for (uint32_t z = 0; z < t.channels(); ++z) {
    for (uint32_t ty = 0; ty < grid.rows; ++ty) {
      for (uint32_t tx = 0; tx < grid.cols; ++tx, ++ordinal) {
        const uint8_t idx = plan.indices[ordinal];
        const CdfTable& table =
            idx == kCustomModelIndex ? *custom_tables[z] : dict.table(idx);
        const auto y1 = static_cast<uint32_t>(
            std::min<uint64_t>(t.height(), uint64_t{ty + 1} * grid.tile_size));
        const auto x1 = static_cast<uint32_t>(
            std::min<uint64_t>(t.width(), uint64_t{tx + 1} * grid.tile_size));
        for (uint32_t y = ty * grid.tile_size; y < y1; ++y) {
          for (uint32_t x = tx * grid.tile_size; x < x1; ++x) {
            enc.Encode(table, alphabet.index(t.at(y, x, z)));
          }
        }
      }
    }
  }
  const Bytes payload = enc.Finish();
  const Bytes indices = DeflateRaw(plan.indices);
  const Bytes customs = DeflateRaw(SerializeCustomBlock(plan.custom));

  BitstreamHeader h;
  h.height = t.height();
  h.width = t.width();
  h.channels = t.channels();
  h.alphabet = alphabet;
  h.tile_size = static_cast<uint16_t>(options.tile_size);
  h.threshold_micros = internal::ThresholdMicros(options.plan.threshold);
  h.dictionary_digest = dict.digest();
  Bitstream tiled{internal::Assemble(h, indices, customs, payload), std::move(plan)};
  if (options.global_fallback) {
    Bitstream global = EncodeGlobalBaseline(t, dict);
    if (global.bytes.size() < tiled.bytes.size()) return global;
  }
  return tiled;
}

// One global model for every code and no side information.
inline Bitstream EncodeGlobalBaseline(const CodeTensor& t, const Dictionary& global) {
  Require(global.size() >= 1, "dictionary has no models");
  Require(t.alphabet() == global.alphabet(), "tensor alphabet differs from model alphabet");
  const CdfTable& table = global.table(0);
  RangeEncoder enc;
  for (uint32_t z = 0; z < t.channels(); ++z) {
    for (uint32_t y = 0; y < t.height(); ++y) {
      for (uint32_t x = 0; x < t.width(); ++x) {
        enc.Encode(table, t.alphabet().index(t.at(y, x, z)));
      }
    }
  }
  const Bytes payload = enc.Finish();
  BitstreamHeader h;
  h.height = t.height();
  h.width = t.width();
  h.channels = t.channels();
  h.alphabet = t.alphabet();
  h.tile_size = 0;
  h.dictionary_digest = global.digest();
  return Bitstream{internal::Assemble(h, {}, {}, payload), std::nullopt};
}

inline Bitstream EncodeGlobalBaseline(const CodeTensor& t, const Multinomial& global_model) {
  const Multinomial models[] = {global_model};
  return EncodeGlobalBaseline(t, Dictionary::FromModels(t.alphabet(), models));
}

inline CodeTensor DecodeImage(std::span<const uint8_t> bytes, const Dictionary& dict) {
  const BitstreamHeader h = ParseHeader(bytes);
  if (h.dictionary_digest != dict.digest()) {
    Fail(ErrorKind::kWrongDictionary, "bitstream was encoded with a different dictionary");
  }
  if (h.alphabet != dict.alphabet()) {
    Fail(ErrorKind::kWrongDictionary, "dictionary alphabet differs from bitstream");
  }
  const Alphabet& alphabet = h.alphabet;
  const size_t cells = size_t{h.height} * h.width * h.channels;
  size_t offset = kBitstreamHeaderBytes;
  const auto index_section = bytes.subspan(offset, h.index_bytes);
  offset += h.index_bytes;
  const auto custom_section = bytes.subspan(offset, h.custom_bytes);
  offset += h.custom_bytes;
  const auto payload = bytes.subspan(offset, h.payload_bytes);

  std::vector<int32_t> values(cells);
  RangeDecoder dec(payload);
  if (h.global_model()) {
    const CdfTable& table = dict.table(0);
    for (uint32_t z = 0; z < h.channels; ++z) {
      for (uint32_t y = 0; y < h.height; ++y) {
        for (uint32_t x = 0; x < h.width; ++x) {
          values[(size_t{y} * h.width + x) * h.channels + z] =
              alphabet.symbol(dec.Decode(table));
        }
      }
    }
    return CodeTensor(h.height, h.width, h.channels, alphabet, std::move(values));
  }

  const TileGrid grid(h.height, h.width, h.channels, h.tile_size);
  const Bytes indices = InflateRaw(index_section, grid.tile_count());
  const size_t max_custom = 4 + size_t{h.channels} * (9 + size_t{alphabet.size()});
  const auto custom = ParseCustomBlock(InflateRawBounded(custom_section, max_custom),
                                       h.channels, alphabet);
  std::vector<std::optional<CdfTable>> custom_tables(h.channels);
  for (uint32_t z = 0; z < h.channels; ++z) {
    if (custom[z]) custom_tables[z] = CustomTable(*custom[z], alphabet);
  }
  size_t ordinal = 0;
  for (uint32_t z = 0; z < h.channels; ++z) {
    for (uint32_t ty = 0; ty < grid.rows; ++ty) {
      for (uint32_t tx = 0; tx < grid.cols; ++tx, ++ordinal) {
        const uint8_t idx = indices[ordinal];
        const CdfTable* table = nullptr;
        if (idx == kCustomModelIndex) {
          if (!custom_tables[z]) {
            Fail(ErrorKind::kFormat, "tile " + std::to_string(ordinal) +
                                         " uses index 255 but channel " +
                                         std::to_string(z) + " has no custom model");
          }
          table = &*custom_tables[z];
        } else if (idx >= dict.size()) {
          Fail(ErrorKind::kFormat, "tile " + std::to_string(ordinal) + " uses model " +
                                       std::to_string(idx) + " of a " +
                                       std::to_string(dict.size()) + "-model dictionary");
        } else {
          table = &dict.table(idx);
        }
        const auto y1 = static_cast<uint32_t>(
            std::min<uint64_t>(h.height, uint64_t{ty + 1} * grid.tile_size));
        const auto x1 = static_cast<uint32_t>(
            std::min<uint64_t>(h.width, uint64_t{tx + 1} * grid.tile_size));
        for (uint32_t y = ty * grid.tile_size; y < y1; ++y) {
          for (uint32_t x = tx * grid.tile_size; x < x1; ++x) {
            values[(size_t{y} * h.width + x) * h.channels + z] =
                alphabet.symbol(dec.Decode(*table));
          }
        }
      }
    }
  }
  return CodeTensor(h.height, h.width, h.channels, alphabet, std::move(values));
}

inline CodeTensor DecodeImage(const Bitstream& bs, const Dictionary& dict) {
  return DecodeImage(bs.bytes, dict);
}

struct RateBreakdown {
  uint64_t header_bits = 0;  // fixed header plus CRC trailer
  uint64_t index_bits = 0;
  uint64_t custom_bits = 0;
  uint64_t payload_bits = 0;
  uint64_t pixel_count = 1;
  std::vector<ChannelAccounting> channels;  // empty for parsed streams

  uint64_t side_info_bits() const { return index_bits + custom_bits; }
  uint64_t total_bits() const { return header_bits + index_bits + custom_bits + payload_bits; }
  double bpp() const {
    return static_cast<double>(total_bits()) / static_cast<double>(pixel_count);
  }
};

inline RateBreakdown RateReport(std::span<const uint8_t> bytes, uint64_t pixel_count) {
  Require(pixel_count >= 1, "pixel_count must be at least 1");
  const BitstreamHeader h = ParseHeader(bytes);
  RateBreakdown r;
  r.header_bits = 8 * (kBitstreamHeaderBytes + kBitstreamTrailerBytes);
  r.index_bits = 8ull * h.index_bytes;
  r.custom_bits = 8ull * h.custom_bytes;
  r.payload_bits = 8ull * h.payload_bytes;
  r.pixel_count = pixel_count;
  return r;
}

inline RateBreakdown RateReport(const Bitstream& bs, uint64_t pixel_count) {
  RateBreakdown r = RateReport(bs.bytes, pixel_count);
  if (bs.plan) r.channels = bs.plan->accounting;
  return r;
}

}  // namespace slimd

#endif  // SLIMD_CONTAINER_HPP_
