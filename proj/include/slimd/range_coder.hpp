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

// Static-model range coder with 16-bit frequency tables.
//
// The coder keeps a 32-bit range and a 32-bit low window plus one carry bit,
// renormalizes a byte at a time when the range drops below 2^24, and
// propagates carries through a cached byte and a run of pending 0xFF bytes.
// Each symbol splits the range exactly: the sub-interval of symbol s is
//
//   [floor(range * cum[s] / 2^16), floor(range * cum[s+1] / 2^16))
//
// so the sub-intervals of all symbols tile the range with no loss to
// truncation. Only integer arithmetic is used, so output is identical on all
// platforms.
//
// Stream layout: no leading byte; the decoder primes itself with the first
// four bytes and reads zeros past the end of the payload, which lets the
// encoder drop trailing zero bytes. The flush emits the fewest bytes that
// identify a value inside the final interval; an empty sequence encodes to
// zero bytes.

#ifndef SLIMD_RANGE_CODER_HPP_
#define SLIMD_RANGE_CODER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "slimd/byte_io.hpp"
#include "slimd/error.hpp"

namespace slimd {

inline constexpr int kCdfPrecisionBits = 16;
inline constexpr uint32_t kCdfTotal = 1u << kCdfPrecisionBits;

// Cumulative frequency table: cum[0] = 0, cum[n] = 2^16, strictly increasing.
class CdfTable {
 public:
  CdfTable() = default;

  static CdfTable FromFrequencies(std::span<const uint32_t> freqs) {
    Require(!freqs.empty(), "cdf table needs at least one symbol");
    CdfTable t;
    t.cum_.resize(freqs.size() + 1);
    uint64_t acc = 0;
    for (size_t i = 0; i < freqs.size(); ++i) {
      Require(freqs[i] >= 1, "every symbol needs frequency >= 1");
      t.cum_[i] = static_cast<uint32_t>(acc);
      acc += freqs[i];
      Require(acc <= kCdfTotal, "frequencies exceed 2^16");
    }
    Require(acc == kCdfTotal, "frequencies must sum to 2^16");
    t.cum_.back() = kCdfTotal;
    return t;
  }

  size_t size() const { return cum_.empty() ? 0 : cum_.size() - 1; }
  uint32_t cum(size_t s) const { return cum_[s]; }
  uint32_t freq(size_t s) const { return cum_[s + 1] - cum_[s]; }
  std::span<const uint32_t> cumulative() const { return cum_; }

  std::vector<uint32_t> frequencies() const {
    std::vector<uint32_t> f(size());
    for (size_t s = 0; s < f.size(); ++s) f[s] = freq(s);
    return f;
  }

  // Code length of symbol s in bits under the fixed-point model.
  double cost_bits(size_t s) const {
    return kCdfPrecisionBits - std::log2(static_cast<double>(freq(s)));
  }

  bool operator==(const CdfTable&) const = default;

 private:
  std::vector<uint32_t> cum_;
};

// Largest-remainder apportionment of 2^16 across `probs`, with every symbol
// receiving at least 1. Remainder ties go to the lower index.
inline CdfTable BuildCdf(std::span<const double> probs) {
  const size_t n = probs.size();
  Require(n >= 1, "cannot build a cdf over an empty alphabet");
  Require(n <= kCdfTotal, "alphabet larger than 2^16 cannot give every symbol frequency >= 1");
  double total = 0.0;
  for (double p : probs) {
    Require(p > 0.0 && std::isfinite(p), "cdf probabilities must be positive");
    total += p;
  }
  std::vector<double> quota(n);
  std::vector<uint32_t> freq(n);
  int64_t sum = 0;
  for (size_t i = 0; i < n; ++i) {
    quota[i] = probs[i] / total * kCdfTotal;
    const double fl = std::floor(quota[i]);
    freq[i] = std::max<uint32_t>(1, static_cast<uint32_t>(std::min<double>(fl, kCdfTotal)));
    sum += freq[i];
  }
  std::vector<size_t> order(n);
  auto by_remainder = [&](bool largest_first) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      const double ra = quota[a] - freq[a];
      const double rb = quota[b] - freq[b];
      return largest_first ? ra > rb : ra < rb;
    });
  };
  if (sum < kCdfTotal) {
    // Deficit is below n because sum(floor(quota)) > 2^16 - n.
    by_remainder(true);
    for (size_t k = 0; sum < kCdfTotal; ++k) {
      ++freq[order[k % n]];
      ++sum;
    }
  }
  while (sum > kCdfTotal) {
    // Symbols raised to the minimum of 1 pushed the total over; take the
    // excess back from the most over-allocated symbols that can spare it.
    by_remainder(false);
    bool progressed = false;
    for (size_t k = 0; k < n && sum > kCdfTotal; ++k) {
      if (freq[order[k]] > 1) {
        --freq[order[k]];
        --sum;
        progressed = true;
      }
    }
    if (!progressed) Fail(ErrorKind::kInvalidArgument, "cdf apportionment failed");
  }
  return CdfTable::FromFrequencies(freq);
}

class RangeEncoder {
 public:
  void Encode(const CdfTable& table, uint32_t symbol) {
    const uint64_t r = range_;
    const uint64_t a = (r * table.cum(symbol)) >> kCdfPrecisionBits;
    const uint64_t b = (r * table.cum(symbol + 1)) >> kCdfPrecisionBits;
    low_ += a;
    range_ = static_cast<uint32_t>(b - a);
    while (range_ < kTop) {
      range_ <<= 8;
      ShiftLow();
    }
  }

  Bytes Finish() {
    // Smallest k such that some value in [low, low + range) has only its
    // top k bytes nonzero; k <= 1 whenever range >= 2^24.
    for (int k = 0; k <= 4; ++k) {
      const uint64_t step = uint64_t{1} << (32 - 8 * k);
      const uint64_t v = (low_ + step - 1) / step * step;
      if (v < low_ + range_) {
        low_ = v;
        for (int i = 0; i < k; ++i) ShiftLow();
        break;
      }
    }
    const auto carry = static_cast<uint8_t>(low_ >> 32);
    if (have_cache_) out_.push_back(static_cast<uint8_t>(cache_ + carry));
    for (; pending_ > 0; --pending_) out_.push_back(static_cast<uint8_t>(0xFF + carry));
    while (!out_.empty() && out_.back() == 0) out_.pop_back();
    return std::move(out_);
  }

 private:
  static constexpr uint32_t kTop = 1u << 24;

  void ShiftLow() {
    if (low_ < 0xFF000000u || low_ >= (uint64_t{1} << 32)) {
      const auto carry = static_cast<uint8_t>(low_ >> 32);
      if (have_cache_) out_.push_back(static_cast<uint8_t>(cache_ + carry));
      for (; pending_ > 0; --pending_) out_.push_back(static_cast<uint8_t>(0xFF + carry));
      cache_ = static_cast<uint8_t>(low_ >> 24);
      have_cache_ = true;
    } else {
      ++pending_;
    }
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  uint64_t low_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
  uint8_t cache_ = 0;
  bool have_cache_ = false;
  uint64_t pending_ = 0;
  Bytes out_;
};

// Never reads outside `data`; bytes past the end read as zero. Decoding
// garbage or with the wrong tables yields garbage symbols, never a crash.
class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> data) : data_(data) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | NextByte();
  }

  uint32_t Decode(const CdfTable& table) {
    const uint64_t r = range_;
    // Largest s with floor(r * cum[s] / 2^16) <= code.
    size_t lo = 0;
    size_t hi = table.size();  // answer in [lo, hi)
    while (hi - lo > 1) {
      const size_t mid = lo + (hi - lo) / 2;
      if (((r * table.cum(mid)) >> kCdfPrecisionBits) <= code_) lo = mid;
      else hi = mid;
    }
    const uint64_t a = (r * table.cum(lo)) >> kCdfPrecisionBits;
    const uint64_t b = (r * table.cum(lo + 1)) >> kCdfPrecisionBits;
    code_ -= static_cast<uint32_t>(a);
    range_ = static_cast<uint32_t>(b - a);
    while (range_ < (1u << 24)) {
      code_ = (code_ << 8) | NextByte();
      range_ <<= 8;
    }
    return static_cast<uint32_t>(lo);
  }

 private:
  uint32_t NextByte() { return pos_ < data_.size() ? data_[pos_++] : 0u; }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
  uint32_t code_ = 0;
  uint32_t range_ = 0xFFFFFFFFu;
};

// Codes symbols[i] under *tables[i].
inline Bytes RangeEncode(std::span<const uint32_t> symbols,
                         std::span<const CdfTable* const> tables) {
  Require(symbols.size() == tables.size(), "need one table per symbol");
  RangeEncoder enc;
  for (size_t i = 0; i < symbols.size(); ++i) {
    Require(symbols[i] < tables[i]->size(), "symbol outside its table");
    enc.Encode(*tables[i], symbols[i]);
  }
  return enc.Finish();
}

inline std::vector<uint32_t> RangeDecode(std::span<const uint8_t> payload,
                                         std::span<const CdfTable* const> tables,
                                         size_t count) {
  Require(count == tables.size(), "need one table per decoded symbol");
  RangeDecoder dec(payload);
  std::vector<uint32_t> out(count);
  for (size_t i = 0; i < count; ++i) out[i] = dec.Decode(*tables[i]);
  return out;
}

// Ideal code length of the sequence under the fixed-point tables.
inline double FixedPointBits(std::span<const uint32_t> symbols,
                             std::span<const CdfTable* const> tables) {
  double bits = 0.0;
  for (size_t i = 0; i < symbols.size(); ++i) bits += tables[i]->cost_bits(symbols[i]);
  return bits;
}

}  // namespace slimd

#endif  // SLIMD_RANGE_CODER_HPP_
