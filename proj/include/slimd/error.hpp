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

#ifndef SLIMD_ERROR_HPP_
#define SLIMD_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace slimd {

enum class ErrorKind {
  kInvalidArgument,
  kOutOfAlphabet,
  kFormat,           // malformed or truncated file / stream
  kWrongDictionary,  // bitstream digest does not match the supplied dictionary
  kCorruption,       // checksum failure
};

inline const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kOutOfAlphabet: return "out of alphabet";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kWrongDictionary: return "wrong dictionary";
    case ErrorKind::kCorruption: return "corruption";
  }
  return "unknown";
}

// Every failure in the library is reported as an Error carrying its kind, so
// front ends can map kinds to exit codes without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void Require(bool condition, const std::string& what) {
  if (!condition) Fail(ErrorKind::kInvalidArgument, what);
}

}  // namespace slimd

#endif  // SLIMD_ERROR_HPP_
