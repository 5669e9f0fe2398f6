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

#ifndef SLIMD_RANDOM_HPP_
#define SLIMD_RANDOM_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace slimd {

// Seeded generator with platform-independent sampling. std::mt19937_64 output
// is fixed by the standard; the std:: distributions are not, so the helpers
// below derive every variate from the raw engine bits.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Bits() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  uint64_t Below(uint64_t n) {
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  // Index drawn with probability proportional to weights[i] (need not be
  // normalized). Falls back to uniform when all weights are zero.
  size_t Weighted(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) return static_cast<size_t>(Below(weights.size()));
    const double target = Uniform() * total;
    double acc = 0.0;
    size_t last_positive = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = i;
      if (target < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

// Inverse-CDF sampler over a fixed probability vector.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> probs) : cumulative_(probs.size()) {
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cumulative_[i] = acc;
    }
    total_ = acc;
  }

  size_t Sample(Rng& rng) const {
    const double u = rng.Uniform() * total_;
    // First bin whose cumulative mass exceeds u; zero-probability bins share
    // their predecessor's cumulative value and are never returned.
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
      it = std::lower_bound(cumulative_.begin(), cumulative_.end(), total_);
    }
    return static_cast<size_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace slimd

#endif  // SLIMD_RANDOM_HPP_
