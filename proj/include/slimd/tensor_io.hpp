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

// Tensor file format, version 1 (all integers little-endian):
//
//   "SLTN"            4 bytes
//   version           u16 (= 1)
//   height, width,    u32 each
//   channels
//   alphabet lo, hi   i32 each
//   values            height*width*channels i32, (y, x, z) row-major,
//                     channel innermost

#ifndef SLIMD_TENSOR_IO_HPP_
#define SLIMD_TENSOR_IO_HPP_

#include <cstdint>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "slimd/byte_io.hpp"
#include "slimd/error.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

inline constexpr uint16_t kTensorFormatVersion = 1;
inline constexpr size_t kTensorHeaderBytes = 26;

inline Bytes WriteTensor(const CodeTensor& t) {
  ByteWriter w;
  w.Tag("SLTN");
  w.U16(kTensorFormatVersion);
  w.U32(t.height());
  w.U32(t.width());
  w.U32(t.channels());
  w.I32(t.alphabet().lo);
  w.I32(t.alphabet().hi);
  for (int32_t v : t.values()) w.I32(v);
  return w.Take();
}

inline CodeTensor ReadTensor(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  r.ExpectTag("SLTN");
  const size_t version_at = r.pos();
  const uint16_t version = r.U16();
  if (version != kTensorFormatVersion) {
    Fail(ErrorKind::kFormat, "unsupported tensor version " + std::to_string(version) +
                                 " at byte offset " + std::to_string(version_at));
  }
  const uint32_t height = r.U32();
  const uint32_t width = r.U32();
  const uint32_t channels = r.U32();
  const size_t alphabet_at = r.pos();
  const int32_t lo = r.I32();
  const int32_t hi = r.I32();
  if (height == 0 || width == 0 || channels == 0) {
    Fail(ErrorKind::kFormat, "zero tensor dimension in header");
  }
  if (lo > hi || int64_t{hi} - lo + 1 > kMaxAlphabetSize) {
    Fail(ErrorKind::kFormat,
         "invalid alphabet at byte offset " + std::to_string(alphabet_at));
  }
  const uint64_t cells = uint64_t{height} * width * channels;
  if (cells > r.remaining() / 4) {
    Fail(ErrorKind::kFormat, "truncated payload: header declares " +
                                 std::to_string(cells) + " values, " +
                                 std::to_string(r.remaining() / 4) +
                                 " present after byte offset " + std::to_string(r.pos()));
  }
  const Alphabet alphabet{lo, hi};
  std::vector<int32_t> values(cells);
  for (uint64_t i = 0; i < cells; ++i) {
    const size_t at = r.pos();
    values[i] = r.I32();
    if (!alphabet.contains(values[i])) {
      Fail(ErrorKind::kFormat, "value " + std::to_string(values[i]) +
                                   " outside declared alphabet " + ToString(alphabet) +
                                   " at byte offset " + std::to_string(at));
    }
  }
  if (r.remaining() != 0) {
    Fail(ErrorKind::kFormat, std::to_string(r.remaining()) +
                                 " trailing bytes after tensor at byte offset " +
                                 std::to_string(r.pos()));
  }
  return CodeTensor(height, width, channels, alphabet, std::move(values));
}

inline Bytes ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kInvalidArgument, "cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void WriteFileBytes(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kInvalidArgument, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kInvalidArgument, "short write to " + path);
}

inline CodeTensor LoadTensor(const std::string& path) {
  return ReadTensor(ReadFileBytes(path));
}

inline void SaveTensor(const std::string& path, const CodeTensor& t) {
  WriteFileBytes(path, WriteTensor(t));
}

}  // namespace slimd

#endif  // SLIMD_TENSOR_IO_HPP_
