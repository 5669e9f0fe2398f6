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

// Seeded synthetic code tensors standing in for the output of a learned
// image encoder. Four source kinds are supported:
//
//   constant(v)                  every cell is v
//   iid(p)                       p[i] is the probability of symbol lo + i
//   laplacian(mu, scale)         p(k) proportional to exp(-|k - mu| / scale)
//                                over the tensor alphabet
//   patchwork(regions)           rectangles (fractions of height/width) each
//                                with its own source; later regions win
//
// Output is a pure function of (spec, dims, alphabet, seed).

#ifndef SLIMD_SYNTHETIC_HPP_
#define SLIMD_SYNTHETIC_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slimd/error.hpp"
#include "slimd/random.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

struct ConstantSource {
  int32_t value = 0;
};

struct IidSource {
  std::vector<double> probs;  // one entry per alphabet symbol
};

struct LaplacianSource {
  double mu = 0.0;
  double scale = 1.0;
};

using SourceSpec = std::variant<ConstantSource, IidSource, LaplacianSource>;

struct PatchRegion {
  // Half-open rectangle in fractions of the tensor extent: a cell (y, x)
  // belongs to the region when its center ((y + .5) / H, (x + .5) / W) lies
  // in [top, bottom) x [left, right).
  double top = 0.0;
  double left = 0.0;
  double bottom = 1.0;
  double right = 1.0;
  SourceSpec source;
};

struct PatchworkSpec {
  std::vector<PatchRegion> regions;
};

using GeneratorSpec = std::variant<ConstantSource, IidSource, LaplacianSource, PatchworkSpec>;

// Discretized Laplacian over the alphabet, normalized to sum 1.
inline std::vector<double> LaplacianProbs(const Alphabet& alphabet, double mu,
                                          double scale) {
  Require(scale > 0.0, "laplacian scale must be positive");
  std::vector<double> p(alphabet.size());
  double total = 0.0;
  for (uint32_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(-std::abs(static_cast<double>(alphabet.symbol(i)) - mu) / scale);
    total += p[i];
  }
  Require(total > 0.0, "laplacian has no mass on the alphabet");
  for (double& v : p) v /= total;
  return p;
}

namespace internal {

// A source resolved against the alphabet: either a fixed value or a sampler.
struct ResolvedSource {
  std::optional<int32_t> constant;
  std::optional<CategoricalSampler> sampler;

  int32_t Draw(const Alphabet& alphabet, Rng& rng) const {
    if (constant) return *constant;
    return alphabet.symbol(static_cast<uint32_t>(sampler->Sample(rng)));
  }
};

inline ResolvedSource Resolve(const SourceSpec& spec, const Alphabet& alphabet) {
  ResolvedSource out;
  if (const auto* c = std::get_if<ConstantSource>(&spec)) {
    Require(alphabet.contains(c->value), "constant value " + std::to_string(c->value) +
                                             " outside alphabet " + ToString(alphabet));
    out.constant = c->value;
  } else if (const auto* iid = std::get_if<IidSource>(&spec)) {
    Require(iid->probs.size() == alphabet.size(),
            "iid probabilities must have one entry per alphabet symbol");
    double total = 0.0;
    for (double v : iid->probs) {
      Require(v >= 0.0 && std::isfinite(v), "iid probabilities must be nonnegative");
      total += v;
    }
    Require(total > 0.0, "iid probabilities must not all be zero");
    out.sampler.emplace(iid->probs);
  } else {
    const auto& lap = std::get<LaplacianSource>(spec);
    out.sampler.emplace(LaplacianProbs(alphabet, lap.mu, lap.scale));
  }
  return out;
}

}  // namespace internal

inline CodeTensor GenerateSynthetic(const GeneratorSpec& spec, uint32_t height,
                                    uint32_t width, uint32_t channels,
                                    Alphabet alphabet, uint64_t seed) {
  Require(height >= 1 && width >= 1 && channels >= 1, "tensor dimensions must be positive");
  alphabet = Alphabet::Checked(alphabet.lo, alphabet.hi);
  Rng rng(seed);
  std::vector<int32_t> values(size_t{height} * width * channels);

  if (const auto* patch = std::get_if<PatchworkSpec>(&spec)) {
    Require(!patch->regions.empty(), "patchwork needs at least one region");
    std::vector<internal::ResolvedSource> sources;
    for (const auto& region : patch->regions) {
      sources.push_back(internal::Resolve(region.source, alphabet));
    }
    size_t i = 0;
    for (uint32_t y = 0; y < height; ++y) {
      const double fy = (y + 0.5) / height;
      for (uint32_t x = 0; x < width; ++x) {
        const double fx = (x + 0.5) / width;
        int owner = -1;
        for (size_t r = 0; r < patch->regions.size(); ++r) {
          const auto& reg = patch->regions[r];
          if (fy >= reg.top && fy < reg.bottom && fx >= reg.left && fx < reg.right) {
            owner = static_cast<int>(r);
          }
        }
        if (owner < 0) {
          Fail(ErrorKind::kInvalidArgument, "patchwork regions leave cell (y=" +
                                                std::to_string(y) + ", x=" +
                                                std::to_string(x) + ") uncovered");
        }
        for (uint32_t z = 0; z < channels; ++z) {
          values[i++] = sources[static_cast<size_t>(owner)].Draw(alphabet, rng);
        }
      }
    }
  } else {
    SourceSpec single;
    if (const auto* c = std::get_if<ConstantSource>(&spec)) single = *c;
    else if (const auto* iid = std::get_if<IidSource>(&spec)) single = *iid;
    else single = std::get<LaplacianSource>(spec);
    const auto source = internal::Resolve(single, alphabet);
    for (auto& v : values) v = source.Draw(alphabet, rng);
  }
  return CodeTensor(height, width, channels, alphabet, std::move(values));
}

}  // namespace slimd

#endif  // SLIMD_SYNTHETIC_HPP_
