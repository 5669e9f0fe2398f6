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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "slimd/slimd.hpp"

namespace {

using namespace slimd;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const Alphabet kAlphabet{-16, 16};

std::vector<double> RandomProbs(Rng& rng, size_t n, double zero_fraction) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) total += v = rng.Uniform() < zero_fraction ? 0.0 : rng.Uniform();
  if (total == 0.0) total = p[rng.Below(n)] = 1.0;
  for (auto& v : p) v /= total;
  return p;
}

SourceSpec RandomSource(Rng& rng, const Alphabet& a) {
  switch (rng.Below(4)) {
    case 0:
      return ConstantSource{a.symbol(static_cast<uint32_t>(rng.Below(a.size())))};
    case 1:
      return IidSource{RandomProbs(rng, a.size(), 0.5)};
    default:
      return LaplacianSource{a.lo + rng.Uniform() * (a.hi - a.lo), 0.3 + 4 * rng.Uniform()};
  }
}

// Up to three overlapping random rectangles over a full background.
PatchworkSpec RandomPatchwork(Rng& rng, const Alphabet& a) {
  PatchworkSpec spec;
  spec.regions.push_back({0, 0, 1, 1, RandomSource(rng, a)});
  for (int i = 0, n = static_cast<int>(rng.Below(4)); i < n; ++i) {
    const double t = rng.Uniform(), l = rng.Uniform();
    spec.regions.push_back({t, l, t + rng.Uniform(), l + rng.Uniform(), RandomSource(rng, a)});
  }
  return spec;
}

Dictionary RandomLaplacianDictionary(Rng& rng, const Alphabet& a, size_t k) {
  std::vector<Multinomial> models;
  for (size_t i = 0; i < k; ++i) {
    models.push_back(
        Smooth(LaplacianProbs(a, a.lo + rng.Uniform() * (a.hi - a.lo), 0.3 + 4 * rng.Uniform())));
  }
  return Dictionary::FromModels(a, models);
}

// ---------------------------------------------------------------------------
// 1. Lossless round trip.

Outcome LosslessRoundTrip() {
  Rng rng(1001);
  const uint32_t tiles[] = {1, 4, 16, 64};
  const size_t ks[] = {1, 16, 255};
  const double thresholds[] = {0.0, 0.005, 0.05};
  std::vector<Dictionary> dicts;
  for (size_t k : ks) dicts.push_back(RandomLaplacianDictionary(rng, kAlphabet, k));
  int failures = 0, non_divisible = 0, with_custom = 0, global_streams = 0;
  const int cases = 1000;
  for (int i = 0; i < cases; ++i) {
    const uint32_t tile = tiles[i % 4];
    const Dictionary& dict = dicts[(i / 4) % 3];
    const double threshold = thresholds[(i / 12) % 3];
    const uint32_t max_side = tile <= 4 ? 40 : 150;
    const uint32_t h = 1 + static_cast<uint32_t>(rng.Below(max_side));
    const uint32_t w = 1 + static_cast<uint32_t>(rng.Below(max_side));
    const uint32_t c = 1 + static_cast<uint32_t>(rng.Below(tile <= 4 ? 3 : 6));
    const auto t = GenerateSynthetic(RandomPatchwork(rng, kAlphabet), h, w, c, kAlphabet, i);
    EncodeOptions opts;
    opts.tile_size = tile;
    opts.plan.threshold = threshold;
    const auto bs = EncodeImage(t, dict, opts);
    non_divisible += (h % tile != 0) || (w % tile != 0);
    if (bs.plan) {
      for (const auto& cd : bs.plan->custom) with_custom += cd.has_value();
    } else {
      ++global_streams;
    }
    if (!(DecodeImage(bs.bytes, dict) == t)) ++failures;
  }
  std::ostringstream os;
  os << cases << " cases (" << non_divisible << " non-divisible, " << with_custom
     << " custom channels, " << global_streams << " global streams), " << failures
     << " mismatches";
  return {failures == 0 && non_divisible > 0 && with_custom > 0, os.str()};
}

// ---------------------------------------------------------------------------
// 2. Per-tile selection equals a brute-force scan.

Outcome SelectionOracle() {
  Rng rng(2002);
  int mismatches = 0;
  const int tiles = 10000;
  std::vector<Dictionary> dicts;
  for (size_t k : {1, 2, 16, 255}) {
    std::vector<Multinomial> models;
    for (size_t m = 0; m < k; ++m) models.push_back(Smooth(RandomProbs(rng, kAlphabet.size(), 0.3)));
    dicts.push_back(Dictionary::FromModels(kAlphabet, models));
  }
  for (int i = 0; i < tiles; ++i) {
    const Dictionary& dict = dicts[i % dicts.size()];
    Tile tile;
    tile.rows = 1 + static_cast<uint32_t>(rng.Below(16));
    tile.cols = 1 + static_cast<uint32_t>(rng.Below(16));
    const CategoricalSampler sampler(RandomProbs(rng, kAlphabet.size(), 0.6));
    for (uint32_t j = 0; j < tile.rows * tile.cols; ++j) {
      tile.codes.push_back(kAlphabet.symbol(static_cast<uint32_t>(sampler.Sample(rng))));
    }
    // Oracle: code-by-code length from the raw frequencies.
    size_t best = 0;
    long double best_bits = std::numeric_limits<long double>::infinity();
    for (size_t m = 0; m < dict.size(); ++m) {
      long double bits = 0;
      for (int32_t code : tile.codes) {
        const uint32_t f = dict.table(m).freq(static_cast<uint32_t>(code - kAlphabet.lo));
        bits -= std::log2(static_cast<long double>(f) / 65536.0L);
      }
      if (bits < best_bits) {
        best_bits = bits;
        best = m;
      }
    }
    if (SelectModel(tile, dict).index != best) ++mismatches;
  }
  return {mismatches == 0, std::to_string(tiles) + " tiles, " + std::to_string(mismatches) +
                               " mismatches"};
}

// ---------------------------------------------------------------------------
// 3. Dictionary learning mechanics.

std::vector<std::vector<double>> SourceCorpus(const std::vector<std::vector<double>>& sources,
                                              size_t per_source, int draws, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out;
  for (const auto& p : sources) {
    const CategoricalSampler sampler(p);
    for (size_t j = 0; j < per_source; ++j) {
      std::vector<double> q(p.size(), 0.0);
      for (int d = 0; d < draws; ++d) q[sampler.Sample(rng)] += 1.0 / draws;
      out.push_back(q);
    }
  }
  return out;
}

double KlBits(const std::vector<double>& q, const std::vector<double>& p) {
  double b = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    if (q[i] > 0) b += q[i] * std::log2(q[i] / p[i]);
  }
  return b;
}

std::vector<double> FloorByBisection(const std::vector<double>& raw, double eps) {
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double m = 0.0;
    for (double r : raw) m += std::max(eps, mid * r);
    (m < 1.0 ? lo : hi) = mid;
  }
  std::vector<double> p;
  double total = 0.0;
  for (double r : raw) total += p.emplace_back(std::max(eps, hi * r));
  for (auto& v : p) v /= total;
  return p;
}

double OracleLoss(const std::vector<std::vector<double>>& corpus,
                  const std::vector<std::vector<double>>& centres) {
  double loss = 0.0;
  for (const auto& q : corpus) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : centres) best = std::min(best, KlBits(q, p));
    loss += best;
  }
  return loss;
}

// Plain Lloyd iteration with KL assignment from random distinct samples.
double OracleLloyd(const std::vector<std::vector<double>>& corpus, size_t k, uint64_t seed) {
  Rng rng(seed);
  std::vector<size_t> idx(corpus.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.Below(idx.size() - i)]);
  std::vector<std::vector<double>> centres;
  for (size_t i = 0; i < k; ++i) centres.push_back(FloorByBisection(corpus[idx[i]], 1e-6));
  for (int it = 0; it < 100; ++it) {
    std::vector<std::vector<double>> sums(k, std::vector<double>(corpus[0].size(), 0.0));
    std::vector<int> counts(k, 0);
    for (const auto& q : corpus) {
      size_t best = 0;
      for (size_t c = 1; c < k; ++c) {
        if (KlBits(q, centres[c]) < KlBits(q, centres[best])) best = c;
      }
      for (size_t s = 0; s < q.size(); ++s) sums[best][s] += q[s];
      ++counts[best];
    }
    for (size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        centres[c] = FloorByBisection(corpus[rng.Below(corpus.size())], 1e-6);
        continue;
      }
      for (auto& v : sums[c]) v /= counts[c];
      centres[c] = FloorByBisection(sums[c], 1e-6);
    }
  }
  return OracleLoss(corpus, centres);
}

Outcome DictionaryLearning() {
  const Alphabet a{0, 11};
  bool ok = true;
  std::ostringstream os;

  // (a) One update step: centres equal the smoothed arithmetic mean of the
  // assigned histograms, bit for bit.
  int exact = 0, checked = 0;
  for (uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> sources;
    for (int s = 0; s < 3; ++s) sources.push_back(RandomProbs(rng, a.size(), 0.3));
    const auto corpus = SourceCorpus(sources, 20, 24, seed);
    const auto init = KMeansPlusPlusInit(corpus, 5, seed);
    const auto first = AssignToCenters(corpus, init.centers);
    const auto r = KlKMeansRefine(corpus, init.centers, 1, seed);
    if (r.reseeded[0] || r.dropped > 0) continue;
    for (uint32_t c = 0; c < init.centers.size(); ++c) {
      std::vector<double> mean(a.size(), 0.0);
      size_t n = 0;
      for (size_t j = 0; j < corpus.size(); ++j) {
        if (first.cluster[j] != c) continue;
        for (size_t s = 0; s < mean.size(); ++s) mean[s] += corpus[j][s];
        ++n;
      }
      for (auto& v : mean) v /= static_cast<double>(n);
      ++checked;
      const bool same_mean = ClusterMean(corpus, first.cluster, c) == mean;
      const bool same_centre = r.centers[c] == Smooth(mean);
      exact += same_mean && same_centre;
    }
  }
  ok &= checked > 0 && exact == checked;
  os << "(a) " << exact << "/" << checked << " centroids exact; ";

  // (b) Non-increasing loss between reseeds.
  int violations = 0, steps = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed + 500);
    std::vector<std::vector<double>> sources;
    for (int s = 0, n = 2 + static_cast<int>(rng.Below(5)); s < n; ++s) {
      sources.push_back(RandomProbs(rng, a.size(), 0.4));
    }
    const auto corpus = SourceCorpus(sources, 15, 8 + static_cast<int>(rng.Below(40)), seed);
    const size_t k = 2 + rng.Below(10);
    const auto r = KlKMeansRefine(corpus, KMeansPlusPlusInit(corpus, k, seed).centers, 40, seed);
    for (size_t t = 0; t + 1 < r.loss_trace.size(); ++t) {
      if (r.reseeded[t]) continue;
      ++steps;
      if (r.loss_trace[t + 1] > r.loss_trace[t] * (1 + 1e-12) + 1e-12) ++violations;
    }
  }
  ok &= violations == 0 && steps > 0;
  os << "(b) " << violations << " increases over " << steps << " steps; ";

  // (c) Four separable sources against the best of 50 oracle restarts.
  std::vector<std::vector<double>> sources;
  for (double mu : {1.0, 4.0, 7.0, 10.0}) sources.push_back(LaplacianProbs(a, mu, 0.6));
  const auto corpus = SourceCorpus(sources, 50, 128, 5);
  const auto r = KlKMeansRefine(corpus, KMeansPlusPlusInit(corpus, 4, 5).centers, 100, 5);
  std::vector<std::vector<double>> centres;
  for (const auto& c : r.centers) centres.emplace_back(c.probs().begin(), c.probs().end());
  const double ours = OracleLoss(corpus, centres);
  double oracle = std::numeric_limits<double>::infinity();
  for (uint64_t restart = 0; restart < 50; ++restart) {
    oracle = std::min(oracle, OracleLloyd(corpus, 4, 9000 + restart));
  }
  ok &= ours <= 1.05 * oracle;
  os << "(c) loss " << ours << " vs best restart " << oracle;
  return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 4. Coder rate bound.

Outcome CoderRateBound() {
  Rng rng(4004);
  int violations = 0;
  double worst = -1e9;
  const int cases = 10000;
  for (int i = 0; i < cases; ++i) {
    std::vector<CdfTable> pool;
    const size_t alphabet = 1 + rng.Below(300);
    for (int t = 0, n = 1 + static_cast<int>(rng.Below(4)); t < n; ++t) {
      pool.push_back(BuildCdf(Smooth(RandomProbs(rng, alphabet, rng.Uniform()),
                                     1e-7).probs()));
    }
    const size_t length = rng.Below(2000);
    std::vector<uint32_t> symbols;
    std::vector<const CdfTable*> tables;
    double ideal = 0.0;
    for (size_t j = 0; j < length; ++j) {
      const CdfTable& t = pool[rng.Below(pool.size())];
      // Draw from the table's own distribution.
      const uint64_t u = rng.Below(kCdfTotal);
      uint32_t s = 0;
      while (t.cum(s + 1) <= u) ++s;
      symbols.push_back(s);
      tables.push_back(&t);
      ideal -= std::log2(static_cast<double>(t.freq(s)) / kCdfTotal);
    }
    const Bytes payload = RangeEncode(symbols, tables);
    const double excess = 8.0 * payload.size() - ideal;
    worst = std::max(worst, excess);
    if (excess > 40.0) ++violations;
    if (RangeDecode(payload, tables, symbols.size()) != symbols) ++violations;
  }
  const CdfTable coin = BuildCdf(std::vector<double>{0.5, 0.5});
  std::vector<uint32_t> flips(1000000);
  for (auto& f : flips) f = static_cast<uint32_t>(rng.Below(2));
  const std::vector<const CdfTable*> coin_tables(flips.size(), &coin);
  const Bytes coin_payload = RangeEncode(flips, coin_tables);
  const double coin_bits = 8.0 * coin_payload.size();
  const bool coin_ok = coin_bits <= 1.001 * flips.size() + 40 &&
                       RangeDecode(coin_payload, coin_tables, flips.size()) == flips;
  std::ostringstream os;
  os << cases << " cases, " << violations << " violations, worst excess " << worst
     << " bits; 10^6 fair coins in " << coin_bits << " bits";
  return {violations == 0 && coin_ok, os.str()};
}

// ---------------------------------------------------------------------------
// 5. Constant tensor against a Laplacian global model.

Outcome ConstantTensor() {
  const auto start = Clock::now();
  std::vector<Multinomial> models;
  for (double scale : {1.5, 0.5, 1.0, 3.0, 6.0}) models.push_back(Smooth(LaplacianProbs(kAlphabet, 0, scale)));
  const auto dict = Dictionary::FromModels(kAlphabet, models);
  const auto t = CodeTensor::Filled(64, 64, 320, kAlphabet, 0);
  const auto bs = EncodeImage(t, dict);
  const auto base = EncodeGlobalBaseline(t, dict.model(0));
  const bool lossless = DecodeImage(bs, dict) == t;
  const uint64_t pixels = uint64_t{1} << 20;
  const auto r = RateReport(bs, pixels);
  const auto rb = RateReport(base, pixels);
  const double savings = 100.0 * (1.0 - static_cast<double>(r.total_bits()) / rb.total_bits());
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  std::ostringstream os;
  os << "savings " << savings << "%, " << r.bpp() << " bpp vs baseline " << rb.bpp()
     << " bpp, " << seconds << " s";
  return {lossless && savings >= 98.0 && r.bpp() <= 0.01 && seconds < 30.0, os.str()};
}

// ---------------------------------------------------------------------------
// 6. Mixed-source patchwork tensors.

// Four regions from a 2x2 split at a random point, each drawn from a fixed
// family of eight sources.
PatchworkSpec FourRegionImage(Rng& rng, const std::vector<SourceSpec>& family) {
  const double cy = 0.3 + 0.4 * rng.Uniform(), cx = 0.3 + 0.4 * rng.Uniform();
  std::vector<size_t> pick(family.size());
  for (size_t i = 0; i < pick.size(); ++i) pick[i] = i;
  for (size_t i = 0; i < 4; ++i) std::swap(pick[i], pick[i + rng.Below(pick.size() - i)]);
  PatchworkSpec spec;
  spec.regions.push_back({0, 0, cy, cx, family[pick[0]]});
  spec.regions.push_back({0, cx, cy, 1, family[pick[1]]});
  spec.regions.push_back({cy, 0, 1, cx, family[pick[2]]});
  spec.regions.push_back({cy, cx, 1, 1, family[pick[3]]});
  return spec;
}

Outcome MixedSources() {
  Rng rng(6006);
  std::vector<SourceSpec> family = {
      LaplacianSource{0, 0.7},  LaplacianSource{0, 3.0},  LaplacianSource{-7, 1.0},
      LaplacianSource{6, 1.5},  LaplacianSource{12, 0.5}, LaplacianSource{-12, 2.0},
      IidSource{RandomProbs(rng, kAlphabet.size(), 0.7)},
      IidSource{RandomProbs(rng, kAlphabet.size(), 0.85)}};
  const uint32_t h = 64, w = 64, c = 16;
  std::vector<CodeTensor> training;
  for (uint64_t i = 0; i < 20; ++i) {
    training.push_back(GenerateSynthetic(FourRegionImage(rng, family), h, w, c, kAlphabet, 100 + i));
  }
  TrainOptions opts;
  opts.clusters = 64;
  opts.seed = 6;
  const auto dict = TrainDictionary(BuildCorpus(training, 16), opts).dictionary;
  double savings_sum = 0.0, worst = 1e9;
  bool lossless = true;
  for (uint64_t i = 0; i < 20; ++i) {
    const auto t = GenerateSynthetic(FourRegionImage(rng, family), h, w, c, kAlphabet, 500 + i);
    const auto bs = EncodeImage(t, dict);
    const auto base = EncodeGlobalBaseline(t, dict);
    lossless &= DecodeImage(bs, dict) == t;
    const double s = 100.0 * (1.0 - static_cast<double>(bs.bytes.size()) / base.bytes.size());
    savings_sum += s;
    worst = std::min(worst, s);
  }
  const double mean = savings_sum / 20;
  std::ostringstream os;
  os << "mean savings " << mean << "% over 20 images (min " << worst << "%), K = " << dict.size();
  return {lossless && mean >= 10.0, os.str()};
}

// ---------------------------------------------------------------------------
// 7. Custom-model decisions.

Outcome CustomDecisions() {
  Rng rng(7007);
  std::vector<Multinomial> models;
  for (double mu : {-4.0, 0.0, 4.0}) {
    for (double scale : {0.8, 2.0}) models.push_back(Smooth(LaplacianProbs(kAlphabet, mu, scale)));
  }
  const auto dict = Dictionary::FromModels(kAlphabet, models);

  int iid_emitted = 0;
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    const auto& m = dict.model(rng.Below(dict.size()));
    const auto t = GenerateSynthetic(IidSource{std::vector<double>(m.probs().begin(), m.probs().end())},
                                     64, 64, 1, kAlphabet, i);
    iid_emitted += PlanImage(t, dict, 16).custom[0].has_value();
  }

  int constant_emitted = 0, stray_255 = 0;
  for (int i = 0; i < trials; ++i) {
    // Channel 0 constant, channel 1 iid from a dictionary model.
    const int32_t value = kAlphabet.symbol(static_cast<uint32_t>(rng.Below(kAlphabet.size())));
    const auto& m = dict.model(rng.Below(dict.size()));
    PatchworkSpec unused;
    const auto noise = GenerateSynthetic(IidSource{std::vector<double>(m.probs().begin(), m.probs().end())},
                                         32, 32, 1, kAlphabet, 5000 + i);
    std::vector<int32_t> values(32 * 32 * 2);
    for (uint32_t y = 0; y < 32; ++y) {
      for (uint32_t x = 0; x < 32; ++x) {
        values[(y * 32 + x) * 2] = value;
        values[(y * 32 + x) * 2 + 1] = noise.at(y, x, 0);
      }
    }
    const CodeTensor t(32, 32, 2, kAlphabet, std::move(values));
    const auto plan = PlanImage(t, dict, 16);
    constant_emitted += plan.custom[0].has_value();
    const size_t per_channel = plan.grid.tiles_per_channel();
    for (size_t j = per_channel; j < plan.indices.size(); ++j) {
      stray_255 += plan.indices[j] == kCustomModelIndex;
    }
  }
  std::ostringstream os;
  os << "iid channels emitted " << iid_emitted << "/" << trials << "; constant channels emitted "
     << constant_emitted << "/" << trials << "; index 255 in iid channels: " << stray_255;
  return {iid_emitted <= trials / 100 && constant_emitted == trials && stray_255 == 0, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Side-information dominance.

Outcome Dominance() {
  Rng rng(8008);
  const Alphabet a{-8, 8};
  int violations = 0, fallbacks = 0;
  const int cases = 1000;
  std::vector<Multinomial> models = {Smooth(LaplacianProbs(a, 0, 1.5))};
  for (int i = 0; i < 20; ++i) models.push_back(Smooth(RandomProbs(rng, a.size(), 0.3)));
  const auto dict = Dictionary::FromModels(a, models);
  const Multinomial& global = dict.model(0);
  for (int i = 0; i < cases; ++i) {
    PatchworkSpec spec = RandomPatchwork(rng, a);
    if (rng.Uniform() < 0.3) {
      spec.regions[0].source =
          IidSource{std::vector<double>(global.probs().begin(), global.probs().end())};
    }
    const uint32_t h = 1 + rng.Below(48), w = 1 + rng.Below(48), c = 1 + rng.Below(4);
    const auto t = GenerateSynthetic(spec, h, w, c, a, i);
    EncodeOptions opts;
    opts.tile_size = std::vector<uint32_t>{1, 4, 8, 16, 64}[rng.Below(5)];
    opts.plan.threshold = rng.Uniform() * 0.05;
    const auto bs = EncodeImage(t, dict, opts);
    fallbacks += !bs.plan.has_value();
    violations += !(DecodeImage(bs, dict) == t);
    const auto r = RateReport(bs, 1);
    const auto rb = RateReport(EncodeGlobalBaseline(t, global), 1);
    if (r.total_bits() > rb.total_bits() + r.index_bits + r.custom_bits) ++violations;
  }
  return {violations == 0, std::to_string(cases) + " cases (" + std::to_string(fallbacks) +
                               " sent as global streams), " + std::to_string(violations) +
                               " violations"};
}

// ---------------------------------------------------------------------------
// 9. Format conformance.

uint32_t BitwiseCrc32(std::span<const uint8_t> data) {
  uint32_t crc = 0xFFFFFFFFu;
  for (uint8_t b : data) {
    crc ^= b;
    for (int k = 0; k < 8; ++k) crc = (crc >> 1) ^ (0xEDB88320u & (0u - (crc & 1u)));
  }
  return ~crc;
}

uint64_t Fnv1a(std::span<const uint8_t> data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (uint8_t b : data) h = (h ^ b) * 0x100000001b3ull;
  return h;
}

Outcome FormatConformance() {
  // Dictionary file: K = 1, alphabet {0, 1}, frequencies 32768 and 32768.
  const Bytes dict_body = {'S', 'L', 'D', 'C', 1, 0, 0, 0, 0, 0, 1, 0, 0, 0,
                           1,   0,   16,  0xFF, 0x7F, 0xFF, 0x7F};
  Bytes dict_file = dict_body;
  const uint32_t dict_crc = BitwiseCrc32(dict_body);
  for (int i = 0; i < 4; ++i) dict_file.push_back(static_cast<uint8_t>(dict_crc >> (8 * i)));
  const uint64_t digest = Fnv1a(dict_file);

  // 4x4x1 tensor of ones, tile 4, threshold 0.005. The tile's best
  // dictionary cost is 16 bits against ~0 for its own distribution, so a
  // point-mass custom model on symbol 1 (weights {255}, frequencies
  // {1, 65535}) is sent and the tile gets index 255.
  Bytes golden = {'S', 'L', 'I', 'B', 1, 0,  4, 0, 0, 0, 4, 0, 0, 0, 1, 0, 0, 0,
                  0,   0,   0,   0,   1, 0,  0, 0, 4, 0, 0x88, 0x13, 0, 0};
  for (int i = 0; i < 8; ++i) golden.push_back(static_cast<uint8_t>(digest >> (8 * i)));
  const Bytes index_section = {0xFB, 0x0F, 0x00};  // fixed Huffman: literal 255, end of block
  const Bytes custom_section = {0x63, 0x64, 0x60, 0x60, 0x60, 0x64,
                                0x04, 0x11, 0x40, 0xFC, 0x1F, 0x00};
  const Bytes payload = {0x01};
  for (uint32_t n : {3u, 12u, 1u}) {
    for (int i = 0; i < 4; ++i) golden.push_back(static_cast<uint8_t>(n >> (8 * i)));
  }
  golden.insert(golden.end(), index_section.begin(), index_section.end());
  golden.insert(golden.end(), custom_section.begin(), custom_section.end());
  golden.insert(golden.end(), payload.begin(), payload.end());
  const uint32_t crc = BitwiseCrc32(golden);
  for (int i = 0; i < 4; ++i) golden.push_back(static_cast<uint8_t>(crc >> (8 * i)));

  const Bytes custom_raw = {1, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0, 0, 255};
  bool ok = InflateRaw(custom_section, custom_raw.size()) == custom_raw;
  ok &= InflateRaw(index_section, 1) == Bytes{255};

  const auto dict = Dictionary::FromModels(Alphabet{0, 1},
                                           std::vector<Multinomial>{Multinomial({0.5, 0.5}, 1e-6)});
  ok &= dict.Serialize() == dict_file;
  const auto t = CodeTensor::Filled(4, 4, 1, Alphabet{0, 1}, 1);
  const Bytes produced = EncodeImage(t, dict, EncodeOptions{4, {}, false}).bytes;
  const bool golden_match = produced == golden;
  ok &= golden_match && DecodeImage(golden, dict) == t;

  // Single-byte corruption of a larger stream.
  Rng rng(9009);
  const auto big = GenerateSynthetic(RandomPatchwork(rng, kAlphabet), 40, 40, 4, kAlphabet, 9);
  const auto big_dict = RandomLaplacianDictionary(rng, kAlphabet, 16);
  const Bytes stream = EncodeImage(big, big_dict).bytes;
  int detected = 0;
  const int flips = 100;
  for (int i = 0; i < flips; ++i) {
    Bytes bad = stream;
    bad[rng.Below(bad.size())] ^= static_cast<uint8_t>(1 + rng.Below(255));
    try {
      DecodeImage(bad, big_dict);
    } catch (const Error& e) {
      detected += e.kind() == ErrorKind::kCorruption;
    }
  }
  ok &= detected == flips;
  std::ostringstream os;
  os << "golden " << golden.size() << "-byte stream " << (golden_match ? "matches" : "differs")
     << "; " << detected << "/" << flips << " single-byte corruptions detected";
  return {ok, os.str()};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"C1 lossless round trip", LosslessRoundTrip},
      {"C2 per-tile selection oracle", SelectionOracle},
      {"C3 dictionary learning mechanics", DictionaryLearning},
      {"C4 range coder rate bound", CoderRateBound},
      {"C5 constant tensor savings", ConstantTensor},
      {"C6 mixed-source savings", MixedSources},
      {"C7 custom-model decisions", CustomDecisions},
      {"C8 side-information dominance", Dominance},
      {"C9 format conformance", FormatConformance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::printf("%s %-34s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                seconds);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
