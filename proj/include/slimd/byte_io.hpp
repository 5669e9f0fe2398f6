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

// Little-endian serialization helpers and the two hashes used by the file
// formats: CRC-32 (0xEDB88320, via zlib) and 64-bit FNV-1a.

#ifndef SLIMD_BYTE_IO_HPP_
#define SLIMD_BYTE_IO_HPP_

#include <zlib.h>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slimd/error.hpp"

namespace slimd {

using Bytes = std::vector<uint8_t>;

class ByteWriter {
 public:
  void U8(uint8_t v) { out_.push_back(v); }
  void U16(uint16_t v) { PutLE(v, 2); }
  void U32(uint32_t v) { PutLE(v, 4); }
  void I32(int32_t v) { PutLE(static_cast<uint32_t>(v), 4); }
  void U64(uint64_t v) { PutLE(v, 8); }
  void Raw(std::span<const uint8_t> bytes) {
    out_.insert(out_.end(), bytes.begin(), bytes.end());
  }
  void Tag(const char (&magic)[5]) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<uint8_t>(magic[i]));
  }

  size_t size() const { return out_.size(); }
  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  void PutLE(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }

  Bytes out_;
};

// Bounds-checked reader. Every read past the end raises a format error that
// names the byte offset where the read started.
class ByteReader {
 public:
  explicit ByteReader(std::span<const uint8_t> data) : data_(data) {}

  uint8_t U8() { return static_cast<uint8_t>(GetLE(1, "u8")); }
  uint16_t U16() { return static_cast<uint16_t>(GetLE(2, "u16")); }
  uint32_t U32() { return static_cast<uint32_t>(GetLE(4, "u32")); }
  int32_t I32() { return static_cast<int32_t>(static_cast<uint32_t>(GetLE(4, "i32"))); }
  uint64_t U64() { return GetLE(8, "u64"); }

  std::span<const uint8_t> Raw(size_t n, const char* what = "bytes") {
    Need(n, what);
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  void ExpectTag(const char (&magic)[5]) {
    const size_t at = pos_;
    auto got = Raw(4, "magic");
    for (int i = 0; i < 4; ++i) {
      if (got[i] != static_cast<uint8_t>(magic[i])) {
        Fail(ErrorKind::kFormat, std::string("bad magic at byte offset ") +
                                     std::to_string(at) + ", expected \"" +
                                     magic + "\"");
      }
    }
  }

  size_t pos() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }

 private:
  void Need(size_t n, const char* what) const {
    if (data_.size() - pos_ < n) {
      Fail(ErrorKind::kFormat, std::string("truncated input: reading ") + what +
                                   " at byte offset " + std::to_string(pos_) +
                                   " needs " + std::to_string(n) + " bytes, " +
                                   std::to_string(data_.size() - pos_) + " left");
    }
  }

  uint64_t GetLE(int n, const char* what) {
    Need(static_cast<size_t>(n), what);
    uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += static_cast<size_t>(n);
    return v;
  }

  std::span<const uint8_t> data_;
  size_t pos_ = 0;
};

inline uint32_t Crc32(std::span<const uint8_t> data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large inputs.
  size_t off = 0;
  while (off < data.size()) {
    const size_t n = std::min<size_t>(data.size() - off, 1u << 30);
    crc = crc32(crc, data.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<uint32_t>(crc);
}

inline uint64_t Fnv1a64(std::span<const uint8_t> data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace slimd

#endif  // SLIMD_BYTE_IO_HPP_
