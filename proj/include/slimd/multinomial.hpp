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

#ifndef SLIMD_MULTINOMIAL_HPP_
#define SLIMD_MULTINOMIAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slimd/error.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

// Default per-symbol probability floor. Part of format version 1: decoders
// apply it when dequantizing transmitted distributions.
inline constexpr double kDefaultEpsilon = 1e-6;

// Probability vector over an alphabet with every entry at least `floor`,
// so every symbol has a finite code length.
class Multinomial {
 public:
  Multinomial() = default;

  Multinomial(std::vector<double> probs, double floor)
      : probs_(std::move(probs)), floor_(floor) {
    Require(!probs_.empty(), "multinomial needs at least one symbol");
    Require(floor_ > 0.0, "multinomial floor must be positive");
    double total = 0.0;
    for (double p : probs_) {
      Require(p >= floor_, "multinomial entry below its floor");
      total += p;
    }
    Require(std::abs(total - 1.0) <= 1e-9, "multinomial does not sum to 1");
  }

  std::span<const double> probs() const { return probs_; }
  double operator[](size_t i) const { return probs_[i]; }
  size_t size() const { return probs_.size(); }
  double floor() const { return floor_; }

  bool operator==(const Multinomial&) const = default;

 private:
  std::vector<double> probs_;
  double floor_ = kDefaultEpsilon;
};

// Floors every entry at `floor` and rescales the rest by a common factor:
// p[i] = max(floor, s * raw[i]) with s chosen so that sum(p) = 1. This is
// the minimizer of the cross-entropy -sum raw[i] log p[i] over distributions
// with every entry >= floor, so smoothing a histogram mean keeps it the
// KL-optimal centroid within the floored simplex.
inline Multinomial Smooth(std::span<const double> raw, double floor = kDefaultEpsilon) {
  const size_t n = raw.size();
  Require(n >= 1, "cannot smooth an empty distribution");
  Require(floor > 0.0 && floor * static_cast<double>(n) < 1.0,
          "epsilon floor must lie in (0, 1/alphabet_size)");
  double total = 0.0;
  for (double r : raw) {
    Require(r >= 0.0 && std::isfinite(r), "negative or non-finite input probability");
    total += r;
  }
  Require(std::abs(total - 1.0) <= 1e-6, "input probabilities must sum to 1");

  // Water-filling: shrink the unfloored set until every member stays above
  // the floor after rescaling. The scale only decreases, so this terminates.
  std::vector<bool> free(n);
  size_t floored = 0;
  double free_mass = 0.0;
  for (size_t i = 0; i < n; ++i) {
    free[i] = raw[i] > 0.0;
    if (free[i]) free_mass += raw[i];
    else ++floored;
  }
  double scale = 0.0;
  for (;;) {
    scale = (1.0 - static_cast<double>(floored) * floor) / free_mass;
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (free[i] && scale * raw[i] < floor) {
        free[i] = false;
        free_mass -= raw[i];
        ++floored;
        changed = true;
      }
    }
    if (!changed) break;
  }
  std::vector<double> p(n);
  for (size_t i = 0; i < n; ++i) p[i] = free[i] ? std::max(floor, scale * raw[i]) : floor;
  return Multinomial(std::move(p), floor);
}

// KL divergence KL(q || p) in bits; terms with q[i] = 0 contribute 0.
inline double KldBits(std::span<const double> q, const Multinomial& p) {
  Require(q.size() == p.size(), "kld: alphabet size mismatch");
  double bits = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) bits += q[i] * std::log2(q[i] / p[i]);
  }
  return std::max(0.0, bits);
}

// Ideal code length of the histogram's codes under p: -sum counts[s] log2 p[s].
inline double CrossEntropyBits(const Histogram& h, const Multinomial& p) {
  Require(h.size() == p.size(), "cross entropy: alphabet size mismatch");
  double bits = 0.0;
  for (size_t i = 0; i < h.size(); ++i) {
    if (h[i] != 0) bits -= static_cast<double>(h[i]) * std::log2(p[i]);
  }
  return bits;
}

}  // namespace slimd

#endif  // SLIMD_MULTINOMIAL_HPP_
