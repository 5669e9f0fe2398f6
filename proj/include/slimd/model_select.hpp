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

// Per-tile model selection and per-channel custom distributions.
//
// Every tile is coded with the dictionary model that gives its codes the
// shortest code length. Each channel may additionally carry one custom
// distribution, estimated from the tiles the dictionary fits poorly and
// transmitted as 8-bit weights over its support span. Tiles that the custom
// model codes strictly shorter are switched to index 255, but only when the
// channel's total savings exceed the estimated transmission cost of
// 7 bits per bin.
//
// All code lengths here are fixed-point: they are computed from the same
// 16-bit tables the range coder uses, so planned and coded bits agree.

#ifndef SLIMD_MODEL_SELECT_HPP_
#define SLIMD_MODEL_SELECT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "slimd/dictionary.hpp"
#include "slimd/error.hpp"
#include "slimd/multinomial.hpp"
#include "slimd/range_coder.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

inline constexpr uint8_t kCustomModelIndex = 255;
inline constexpr double kDefaultInclusionThreshold = 0.005;
inline constexpr double kCustomCostBitsPerBin = 7.0;

struct Selection {
  uint8_t index = 0;
  double bits = 0.0;
};

inline Selection SelectModel(const Histogram& h, const Dictionary& dict) {
  Require(dict.size() >= 1, "empty dictionary");
  Require(h.size() == dict.alphabet().size(), "histogram does not match dictionary alphabet");
  Selection best{0, std::numeric_limits<double>::infinity()};
  for (size_t i = 0; i < dict.size(); ++i) {
    const double bits = dict.CodeLengthBits(h, i);
    if (bits < best.bits) best = Selection{static_cast<uint8_t>(i), bits};
  }
  return best;
}

inline Selection SelectModel(const Tile& tile, const Dictionary& dict) {
  return SelectModel(TileHistogram(tile, dict.alphabet()), dict);
}

// 8-bit weights over [first, last]; the wire form of a custom distribution.
struct QuantizedDist {
  int32_t first = 0;  // alphabet symbols
  int32_t last = 0;
  std::vector<uint8_t> weights;

  size_t span() const { return weights.size(); }
  bool operator==(const QuantizedDist&) const = default;
};

struct CustomEstimate {
  Multinomial dist;         // smoothed mean of the included tiles
  uint32_t first_index = 0;  // support span of the unsmoothed mean, as
  uint32_t last_index = 0;   // alphabet indices
  size_t included_tiles = 0;

  size_t span() const { return last_index - first_index + 1; }
};

enum class AverageMode {
  kMeanOfTiles,  // each included tile's normalized histogram gets one vote
  kPooledCounts, // included tiles' counts are summed, then normalized
};

// True when a tile's best dictionary code length exceeds its self-entropy
// code length by more than `threshold`, relative to the dictionary length.
inline bool PoorlyModeled(const Histogram& h, double dict_bits, double threshold,
                          double epsilon = kDefaultEpsilon) {
  if (!(dict_bits > 0.0)) return false;
  const double true_bits = CrossEntropyBits(h, Smooth(h.Normalized(), epsilon));
  return (dict_bits - true_bits) / dict_bits > threshold;
}

inline std::optional<CustomEstimate> EstimateCustom(
    std::span<const Histogram> tiles, const Dictionary& dict,
    double threshold = kDefaultInclusionThreshold,
    AverageMode mode = AverageMode::kMeanOfTiles, double epsilon = kDefaultEpsilon) {
  const size_t n = dict.alphabet().size();
  std::vector<double> acc(n, 0.0);
  size_t included = 0;
  uint64_t pooled_total = 0;
  for (const auto& h : tiles) {
    if (h.total() == 0) continue;
    const Selection best = SelectModel(h, dict);
    if (!PoorlyModeled(h, best.bits, threshold, epsilon)) continue;
    ++included;
    if (mode == AverageMode::kMeanOfTiles) {
      const auto q = h.Normalized();
      for (size_t s = 0; s < n; ++s) acc[s] += q[s];
    } else {
      for (size_t s = 0; s < n; ++s) acc[s] += static_cast<double>(h[s]);
      pooled_total += h.total();
    }
  }
  if (included == 0) return std::nullopt;
  const double denom = mode == AverageMode::kMeanOfTiles ? static_cast<double>(included)
                                                         : static_cast<double>(pooled_total);
  for (double& v : acc) v /= denom;
  CustomEstimate est;
  est.included_tiles = included;
  est.first_index = static_cast<uint32_t>(n);
  for (size_t s = 0; s < n; ++s) {
    if (acc[s] > 0.0) {
      est.first_index = std::min(est.first_index, static_cast<uint32_t>(s));
      est.last_index = static_cast<uint32_t>(s);
    }
  }
  est.dist = Smooth(acc, epsilon);
  return est;
}

// Estimated transmission cost: bins in the support span times 7 bits.
inline double CustomCostBits(size_t span) {
  return static_cast<double>(span) * kCustomCostBitsPerBin;
}

inline double CustomCostBits(const CustomEstimate& est) { return CustomCostBits(est.span()); }

// Emit only on strict improvement.
inline bool ShouldEmitCustom(double savings_bits, double cost_bits) {
  return savings_bits > cost_bits;
}

// weights[s] = round(255 p[s]) over [first, last], with zeros raised to 1.
inline QuantizedDist QuantizeDist(const Multinomial& p, const Alphabet& alphabet,
                                  uint32_t first_index, uint32_t last_index) {
  Require(p.size() == alphabet.size(), "distribution does not match alphabet");
  Require(first_index <= last_index && last_index < p.size(), "invalid quantization span");
  QuantizedDist qd;
  qd.first = alphabet.symbol(first_index);
  qd.last = alphabet.symbol(last_index);
  qd.weights.resize(last_index - first_index + 1);
  for (uint32_t s = first_index; s <= last_index; ++s) {
    const double w = std::clamp(std::round(p[s] * 255.0), 0.0, 255.0);
    qd.weights[s - first_index] = static_cast<uint8_t>(std::max(1.0, w));
  }
  return qd;
}

// Span taken as the bins carrying more than the floor.
inline QuantizedDist QuantizeDist(const Multinomial& p, const Alphabet& alphabet) {
  uint32_t first = static_cast<uint32_t>(p.size());
  uint32_t last = 0;
  const double cut = p.floor() * (1.0 + 1e-9);
  for (uint32_t s = 0; s < p.size(); ++s) {
    if (p[s] > cut) {
      first = std::min(first, s);
      last = s;
    }
  }
  if (first > last) {  // flat at the floor: cannot happen for a valid p, keep the mode
    first = last = static_cast<uint32_t>(
        std::max_element(p.probs().begin(), p.probs().end()) - p.probs().begin());
  }
  return QuantizeDist(p, alphabet, first, last);
}

// Normalized weights on the span, floored at `epsilon` everywhere.
inline Multinomial DequantizeDist(const QuantizedDist& qd, const Alphabet& alphabet,
                                  double epsilon = kDefaultEpsilon) {
  Require(qd.first <= qd.last && alphabet.contains(qd.first) && alphabet.contains(qd.last),
          "quantized span outside alphabet");
  Require(qd.weights.size() == size_t(int64_t{qd.last} - qd.first + 1),
          "weight count does not match span");
  uint64_t total = 0;
  for (uint8_t w : qd.weights) total += w;
  Require(total > 0, "quantized weights are all zero");
  std::vector<double> raw(alphabet.size(), 0.0);
  const uint32_t first = alphabet.index(qd.first);
  for (size_t i = 0; i < qd.weights.size(); ++i) {
    raw[first + i] = static_cast<double>(qd.weights[i]) / static_cast<double>(total);
  }
  return Smooth(raw, epsilon);
}

// Coder table of a transmitted custom distribution; encoder and decoder both
// derive it through this function.
inline CdfTable CustomTable(const QuantizedDist& qd, const Alphabet& alphabet) {
  return BuildCdf(DequantizeDist(qd, alphabet).probs());
}

inline double TableBits(const Histogram& h, const CdfTable& table) {
  double bits = 0.0;
  for (size_t s = 0; s < h.size(); ++s) {
    if (h[s] != 0) bits += static_cast<double>(h[s]) * table.cost_bits(s);
  }
  return bits;
}

struct ChannelAccounting {
  bool candidate = false;         // a custom distribution was estimated
  bool emitted = false;
  size_t included_tiles = 0;      // tiles that fed the estimate
  size_t custom_tiles = 0;        // tiles switched to index 255
  size_t span = 0;
  double dictionary_bits = 0.0;   // payload bits with dictionary models only
  double savings_bits = 0.0;      // payload bits saved by the custom model
  double estimated_cost_bits = 0.0;  // 7 bits per bin, used for the decision
  double wire_cost_bits = 0.0;       // 8 bits per bin + 72 bits of framing, pre-DEFLATE
};

struct ChannelPlan {
  std::vector<uint8_t> indices;  // one per tile, row-major over the grid
  std::optional<QuantizedDist> custom;
  ChannelAccounting accounting;
  double planned_bits = 0.0;     // fixed-point payload bits for the channel
};

struct PlanOptions {
  double threshold = kDefaultInclusionThreshold;
  bool custom_enabled = true;
  AverageMode average = AverageMode::kMeanOfTiles;
};

inline ChannelPlan PlanChannel(std::span<const Histogram> tiles, const Dictionary& dict,
                               const PlanOptions& options = {}) {
  ChannelPlan plan;
  std::vector<double> dict_bits(tiles.size());
  plan.indices.resize(tiles.size());
  for (size_t t = 0; t < tiles.size(); ++t) {
    const Selection sel = SelectModel(tiles[t], dict);
    plan.indices[t] = sel.index;
    dict_bits[t] = sel.bits;
    plan.accounting.dictionary_bits += sel.bits;
  }
  plan.planned_bits = plan.accounting.dictionary_bits;
  if (!options.custom_enabled) return plan;

  const auto est = EstimateCustom(tiles, dict, options.threshold, options.average);
  if (!est) return plan;
  auto& acct = plan.accounting;
  acct.candidate = true;
  acct.included_tiles = est->included_tiles;
  const QuantizedDist qd = QuantizeDist(est->dist, dict.alphabet(), est->first_index,
                                        est->last_index);
  acct.span = qd.span();
  acct.estimated_cost_bits = CustomCostBits(qd.span());
  acct.wire_cost_bits = 8.0 * static_cast<double>(qd.span()) + 72.0;

  // Savings are judged with the dequantized model the decoder will rebuild.
  const CdfTable custom = CustomTable(qd, dict.alphabet());
  std::vector<double> custom_bits(tiles.size());
  for (size_t t = 0; t < tiles.size(); ++t) {
    custom_bits[t] = TableBits(tiles[t], custom);
    if (custom_bits[t] < dict_bits[t]) acct.savings_bits += dict_bits[t] - custom_bits[t];
  }
  if (!ShouldEmitCustom(acct.savings_bits, acct.estimated_cost_bits)) return plan;

  acct.emitted = true;
  plan.custom = qd;
  for (size_t t = 0; t < tiles.size(); ++t) {
    if (custom_bits[t] < dict_bits[t]) {
      plan.indices[t] = kCustomModelIndex;
      ++acct.custom_tiles;
    }
  }
  plan.planned_bits = acct.dictionary_bits - acct.savings_bits;
  return plan;
}

// Side information for a whole tensor.
struct TilePlan {
  TileGrid grid;
  std::vector<uint8_t> indices;  // canonical tile order
  std::vector<std::optional<QuantizedDist>> custom;  // per channel
  std::vector<ChannelAccounting> accounting;         // per channel
  double planned_bits = 0.0;
};

// Histograms of every tile in canonical order.
inline std::vector<Histogram> TileHistograms(const CodeTensor& t, const TileGrid& grid,
                                             const Alphabet& alphabet) {
  std::vector<Histogram> out;
  out.reserve(grid.tile_count());
  for (uint32_t z = 0; z < t.channels(); ++z) {
    for (uint32_t ty = 0; ty < grid.rows; ++ty) {
      for (uint32_t tx = 0; tx < grid.cols; ++tx) {
        out.push_back(TileHistogram(ExtractTile(t, grid, ty, tx, z), alphabet));
      }
    }
  }
  return out;
}

inline TilePlan PlanImage(const CodeTensor& t, const Dictionary& dict, uint32_t tile_size,
                          const PlanOptions& options = {}) {
  Require(t.alphabet() == dict.alphabet(), "tensor alphabet " + ToString(t.alphabet()) +
                                               " differs from dictionary alphabet " +
                                               ToString(dict.alphabet()));
  TilePlan plan;
  plan.grid = TileGrid(t, tile_size);
  const auto hists = TileHistograms(t, plan.grid, dict.alphabet());
  const size_t per_channel = plan.grid.tiles_per_channel();
  plan.indices.reserve(hists.size());
  for (uint32_t z = 0; z < t.channels(); ++z) {
    const std::span<const Histogram> channel(hists.data() + size_t{z} * per_channel,
                                             per_channel);
    ChannelPlan cp = PlanChannel(channel, dict, options);
    plan.indices.insert(plan.indices.end(), cp.indices.begin(), cp.indices.end());
    plan.custom.push_back(std::move(cp.custom));
    plan.accounting.push_back(cp.accounting);
    plan.planned_bits += cp.planned_bits;
  }
  return plan;
}

}  // namespace slimd

#endif  // SLIMD_MODEL_SELECT_HPP_
