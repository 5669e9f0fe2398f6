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

// Raw RFC 1951 DEFLATE streams (no zlib or gzip wrapper), backed by zlib.

#ifndef SLIMD_DEFLATE_HPP_
#define SLIMD_DEFLATE_HPP_

#include <zlib.h>

#include <cstdint>
#include <span>
#include <string>

#include "slimd/byte_io.hpp"
#include "slimd/error.hpp"

namespace slimd {

inline Bytes DeflateRaw(std::span<const uint8_t> input) {
  z_stream zs{};
  // windowBits -15 selects a raw stream.
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, -15, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    Fail(ErrorKind::kInvalidArgument, "deflateInit2 failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(input.size())));
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = deflate(&zs, Z_FINISH);
  const size_t produced = zs.total_out;
  deflateEnd(&zs);
  if (rc != Z_STREAM_END) Fail(ErrorKind::kInvalidArgument, "deflate did not finish");
  out.resize(produced);
  return out;
}

// Inflates a raw stream that must decode to exactly `expected_size` bytes
// and end exactly at the end of `input`.
inline Bytes InflateRaw(std::span<const uint8_t> input, size_t expected_size) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) Fail(ErrorKind::kFormat, "inflateInit2 failed");
  Bytes out(expected_size);
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  // One spare byte detects streams that inflate to more than expected.
  uint8_t spare = 0;
  zs.next_out = expected_size ? out.data() : &spare;
  zs.avail_out = static_cast<uInt>(expected_size ? expected_size : 1);
  int rc = inflate(&zs, Z_FINISH);
  if (rc == Z_BUF_ERROR && zs.avail_out == 0 && expected_size > 0) {
    zs.next_out = &spare;
    zs.avail_out = 1;
    rc = inflate(&zs, Z_FINISH);
  }
  const size_t produced = zs.total_out;
  const size_t unread = zs.avail_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) {
    Fail(ErrorKind::kFormat, "malformed DEFLATE stream (zlib code " + std::to_string(rc) + ")");
  }
  if (produced != expected_size) {
    Fail(ErrorKind::kFormat, "DEFLATE stream inflated to " + std::to_string(produced) +
                                 " bytes, expected " + std::to_string(expected_size));
  }
  if (unread != 0) Fail(ErrorKind::kFormat, "trailing bytes after DEFLATE stream");
  return out;
}

// Inflates a raw stream of unknown decoded size, refusing to grow past
// `max_size` bytes.
inline Bytes InflateRawBounded(std::span<const uint8_t> input, size_t max_size) {
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) Fail(ErrorKind::kFormat, "inflateInit2 failed");
  Bytes out;
  zs.next_in = const_cast<Bytef*>(input.data());
  zs.avail_in = static_cast<uInt>(input.size());
  int rc = Z_OK;
  uint8_t chunk[16384];
  while (rc != Z_STREAM_END) {
    zs.next_out = chunk;
    zs.avail_out = sizeof chunk;
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) break;
    out.insert(out.end(), chunk, chunk + (sizeof chunk - zs.avail_out));
    if (out.size() > max_size) break;
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) break;  // truncated
  }
  const size_t unread = zs.avail_in;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END) Fail(ErrorKind::kFormat, "malformed DEFLATE stream");
  if (out.size() > max_size) Fail(ErrorKind::kFormat, "DEFLATE stream inflates too large");
  if (unread != 0) Fail(ErrorKind::kFormat, "trailing bytes after DEFLATE stream");
  return out;
}

}  // namespace slimd

#endif  // SLIMD_DEFLATE_HPP_
