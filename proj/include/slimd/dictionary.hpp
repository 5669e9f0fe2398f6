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

// The dictionary of local entropy models shared by encoder and decoder.
//
// Models are held in their fixed-point form: each model's probabilities are
// exactly freq / 2^16 of its coder table, so every code length computed from
// a Dictionary matches what the range coder spends on the wire.
//
// File format, version 1 (little-endian):
//
//   "SLDC"              4 bytes
//   version             u16 (= 1)
//   alphabet lo, hi     i32 each
//   K                   u16, 1..255
//   precision           u8, log2 of the frequency total (= 16)
//   tables              K * alphabet_size u16, each storing freq - 1
//   checksum            u32 CRC-32 of all preceding bytes

#ifndef SLIMD_DICTIONARY_HPP_
#define SLIMD_DICTIONARY_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slimd/byte_io.hpp"
#include "slimd/error.hpp"
#include "slimd/multinomial.hpp"
#include "slimd/range_coder.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

inline constexpr size_t kMaxDictionaryModels = 255;  // index 255 is reserved
inline constexpr uint16_t kDictionaryFormatVersion = 1;

// Where a trained dictionary came from. Kept in memory and printed by the
// trainer; not part of the file.
struct Provenance {
  uint64_t seed = 0;
  uint64_t corpus_digest = 0;
  uint32_t iterations = 0;
};

// Probabilities implied by a fixed-point table.
inline Multinomial FixedPointModel(const CdfTable& table) {
  std::vector<double> p(table.size());
  for (size_t s = 0; s < p.size(); ++s) {
    p[s] = static_cast<double>(table.freq(s)) / kCdfTotal;
  }
  return Multinomial(std::move(p), 1.0 / kCdfTotal);
}

class Dictionary {
 public:
  Dictionary() = default;

  static Dictionary FromTables(Alphabet alphabet, std::vector<CdfTable> tables,
                               Provenance provenance = {}) {
    Require(!tables.empty(), "dictionary needs at least one model");
    Require(tables.size() <= kMaxDictionaryModels, "dictionary holds at most 255 models");
    Dictionary d;
    d.alphabet_ = Alphabet::Checked(alphabet.lo, alphabet.hi);
    d.provenance_ = provenance;
    for (const auto& t : tables) {
      Require(t.size() == d.alphabet_.size(), "model size does not match alphabet");
    }
    d.tables_ = std::move(tables);
    d.models_.reserve(d.tables_.size());
    d.costs_.reserve(d.tables_.size());
    for (const auto& t : d.tables_) {
      d.models_.push_back(FixedPointModel(t));
      std::vector<double> cost(t.size());
      for (size_t s = 0; s < cost.size(); ++s) cost[s] = t.cost_bits(s);
      d.costs_.push_back(std::move(cost));
    }
    d.digest_ = Fnv1a64(d.Serialize());
    return d;
  }

  static Dictionary FromModels(Alphabet alphabet, std::span<const Multinomial> models,
                               Provenance provenance = {}) {
    std::vector<CdfTable> tables;
    tables.reserve(models.size());
    for (const auto& m : models) tables.push_back(BuildCdf(m.probs()));
    return FromTables(alphabet, std::move(tables), provenance);
  }

  size_t size() const { return tables_.size(); }
  const Alphabet& alphabet() const { return alphabet_; }
  const Multinomial& model(size_t i) const { return models_[i]; }
  const CdfTable& table(size_t i) const { return tables_[i]; }
  std::span<const double> cost_bits(size_t i) const { return costs_[i]; }
  const Provenance& provenance() const { return provenance_; }
  uint64_t digest() const { return digest_; }

  // Fixed-point code length of a histogram under model i.
  double CodeLengthBits(const Histogram& h, size_t i) const {
    const auto& cost = costs_[i];
    double bits = 0.0;
    for (size_t s = 0; s < h.size(); ++s) {
      if (h[s] != 0) bits += static_cast<double>(h[s]) * cost[s];
    }
    return bits;
  }

  Bytes Serialize() const {
    ByteWriter w;
    w.Tag("SLDC");
    w.U16(kDictionaryFormatVersion);
    w.I32(alphabet_.lo);
    w.I32(alphabet_.hi);
    w.U16(static_cast<uint16_t>(tables_.size()));
    w.U8(kCdfPrecisionBits);
    for (const auto& t : tables_) {
      for (size_t s = 0; s < t.size(); ++s) w.U16(static_cast<uint16_t>(t.freq(s) - 1));
    }
    w.U32(Crc32(w.bytes()));
    return w.Take();
  }

  static Dictionary Deserialize(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    r.ExpectTag("SLDC");
    const uint16_t version = r.U16();
    if (version != kDictionaryFormatVersion) {
      Fail(ErrorKind::kFormat, "unsupported dictionary version " + std::to_string(version));
    }
    const int32_t lo = r.I32();
    const int32_t hi = r.I32();
    if (lo > hi || int64_t{hi} - lo + 1 > kMaxAlphabetSize) {
      Fail(ErrorKind::kFormat, "invalid dictionary alphabet");
    }
    const Alphabet alphabet{lo, hi};
    const uint16_t k = r.U16();
    if (k < 1 || k > kMaxDictionaryModels) {
      Fail(ErrorKind::kFormat, "dictionary model count " + std::to_string(k) +
                                   " outside 1..255");
    }
    const uint8_t precision = r.U8();
    if (precision != kCdfPrecisionBits) {
      Fail(ErrorKind::kFormat, "unsupported cdf precision " + std::to_string(precision));
    }
    std::vector<CdfTable> tables;
    tables.reserve(k);
    std::vector<uint32_t> freqs(alphabet.size());
    for (uint16_t m = 0; m < k; ++m) {
      const size_t at = r.pos();
      uint64_t total = 0;
      for (auto& f : freqs) {
        f = uint32_t{r.U16()} + 1;
        total += f;
      }
      if (total != kCdfTotal) {
        Fail(ErrorKind::kFormat, "model " + std::to_string(m) + " at byte offset " +
                                     std::to_string(at) + " does not sum to 2^16");
      }
      tables.push_back(CdfTable::FromFrequencies(freqs));
    }
    const size_t crc_at = r.pos();
    const uint32_t stored = r.U32();
    if (stored != Crc32(bytes.first(crc_at))) {
      Fail(ErrorKind::kFormat, "dictionary checksum mismatch");
    }
    if (r.remaining() != 0) {
      Fail(ErrorKind::kFormat, "trailing bytes after dictionary checksum");
    }
    return FromTables(alphabet, std::move(tables));
  }

 private:
  Alphabet alphabet_;
  std::vector<CdfTable> tables_;
  std::vector<Multinomial> models_;
  std::vector<std::vector<double>> costs_;
  Provenance provenance_;
  uint64_t digest_ = 0;
};

}  // namespace slimd

#endif  // SLIMD_DICTIONARY_HPP_
