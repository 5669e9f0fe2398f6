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

// Dictionary learning: cluster normalized tile histograms q_j into K
// multinomials p_i minimizing
//
//   L = sum_j min_i KL(q_j || p_i).
//
// Seeding is standard K-means++ (squared Euclidean distance between
// histogram vectors). Refinement is Lloyd iteration with KL-divergence
// assignment; the centroid of a cluster is the arithmetic mean of its
// members, which is the exact minimizer of the summed KL divergence. After
// each update, clusters left without members are reseeded from a random
// corpus sample.

#ifndef SLIMD_KMEANS_HPP_
#define SLIMD_KMEANS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>
#include <vector>

#include "slimd/byte_io.hpp"
#include "slimd/dictionary.hpp"
#include "slimd/error.hpp"
#include "slimd/multinomial.hpp"
#include "slimd/random.hpp"
#include "slimd/tensor.hpp"

namespace slimd {

// Normalized histograms of every tile of a set of training tensors.
struct Corpus {
  Alphabet alphabet;
  std::vector<std::vector<double>> histograms;
  uint64_t digest = 0;

  size_t size() const { return histograms.size(); }
};

inline uint64_t CorpusDigest(const std::vector<std::vector<double>>& histograms) {
  ByteWriter w;
  for (const auto& q : histograms) {
    for (double v : q) {
      uint64_t bits;
      std::memcpy(&bits, &v, sizeof bits);
      w.U64(bits);
    }
  }
  return Fnv1a64(w.bytes());
}

inline Corpus BuildCorpus(std::span<const CodeTensor> tensors, uint32_t tile_size) {
  Require(!tensors.empty(), "corpus needs at least one tensor");
  Corpus corpus;
  corpus.alphabet = tensors.front().alphabet();
  for (const auto& t : tensors) {
    Require(t.alphabet() == corpus.alphabet, "corpus tensors have mixed alphabets");
    for (const auto& tile : TilePartition(t, tile_size)) {
      corpus.histograms.push_back(TileHistogram(tile, corpus.alphabet).Normalized());
    }
  }
  corpus.digest = CorpusDigest(corpus.histograms);
  return corpus;
}

// Keeps `count` histograms drawn uniformly without replacement, in their
// original order. A corpus already within `count` is returned unchanged.
inline Corpus SampleCorpus(const Corpus& corpus, size_t count, uint64_t seed) {
  Require(count >= 1, "sample size must be at least 1");
  if (corpus.size() <= count) return corpus;
  Rng rng(seed);
  std::vector<size_t> idx(corpus.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng.Below(idx.size() - i)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.alphabet = corpus.alphabet;
  for (size_t i : idx) out.histograms.push_back(corpus.histograms[i]);
  out.digest = CorpusDigest(out.histograms);
  return out;
}

struct SeedingResult {
  std::vector<Multinomial> centers;  // smoothed copies of the chosen samples
  std::vector<size_t> chosen;        // corpus indices, distinct
};

// K-means++ seeding with squared Euclidean distance.
inline SeedingResult KMeansPlusPlusInit(const std::vector<std::vector<double>>& corpus,
                                        size_t k, uint64_t seed,
                                        double epsilon = kDefaultEpsilon) {
  Require(k >= 1, "K must be at least 1");
  Require(corpus.size() >= k, "corpus smaller than K");
  Rng rng(seed);
  const size_t n = corpus.size();
  SeedingResult out;
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  auto take = [&](size_t idx) {
    taken[idx] = true;
    out.chosen.push_back(idx);
    out.centers.push_back(Smooth(corpus[idx], epsilon));
    const auto& c = corpus[idx];
    for (size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (size_t s = 0; s < c.size(); ++s) {
        const double diff = corpus[j][s] - c[s];
        d += diff * diff;
      }
      d2[j] = std::min(d2[j], d);
    }
  };
  take(static_cast<size_t>(rng.Below(n)));
  while (out.chosen.size() < k) {
    std::vector<double> weights(n);
    double total = 0.0;
    for (size_t j = 0; j < n; ++j) {
      weights[j] = taken[j] ? 0.0 : d2[j];
      total += weights[j];
    }
    if (total > 0.0) {
      take(rng.Weighted(weights));
    } else {
      // Remaining samples duplicate chosen ones; keep the picks distinct.
      std::vector<size_t> free;
      for (size_t j = 0; j < n; ++j) {
        if (!taken[j]) free.push_back(j);
      }
      take(free[rng.Below(free.size())]);
    }
  }
  return out;
}

namespace internal {

// Sparse view of a normalized histogram for fast cross-entropy evaluation.
struct SparseHistogram {
  std::vector<uint32_t> index;
  std::vector<double> mass;
  double neg_entropy = 0.0;  // sum q log2 q
};

inline std::vector<SparseHistogram> Sparsify(const std::vector<std::vector<double>>& corpus) {
  std::vector<SparseHistogram> out(corpus.size());
  for (size_t j = 0; j < corpus.size(); ++j) {
    for (size_t s = 0; s < corpus[j].size(); ++s) {
      const double q = corpus[j][s];
      if (q > 0.0) {
        out[j].index.push_back(static_cast<uint32_t>(s));
        out[j].mass.push_back(q);
        out[j].neg_entropy += q * std::log2(q);
      }
    }
  }
  return out;
}

}  // namespace internal

struct Assignment {
  std::vector<uint32_t> cluster;  // per corpus item
  std::vector<size_t> counts;     // per center
  double loss = 0.0;              // sum of KL divergences, bits
};

// Maps every histogram to the center with the smallest KL(q || p); ties go
// to the lowest index.
inline Assignment AssignToCenters(const std::vector<std::vector<double>>& corpus,
                                  std::span<const Multinomial> centers) {
  const auto sparse = internal::Sparsify(corpus);
  std::vector<std::vector<double>> log_p(centers.size());
  for (size_t c = 0; c < centers.size(); ++c) {
    log_p[c].resize(centers[c].size());
    for (size_t s = 0; s < centers[c].size(); ++s) log_p[c][s] = std::log2(centers[c][s]);
  }
  Assignment a;
  a.cluster.resize(corpus.size());
  a.counts.assign(centers.size(), 0);
  for (size_t j = 0; j < corpus.size(); ++j) {
    const auto& q = sparse[j];
    double best = std::numeric_limits<double>::infinity();
    uint32_t best_c = 0;
    for (size_t c = 0; c < centers.size(); ++c) {
      double ce = 0.0;
      for (size_t e = 0; e < q.index.size(); ++e) ce -= q.mass[e] * log_p[c][q.index[e]];
      if (ce < best) {
        best = ce;
        best_c = static_cast<uint32_t>(c);
      }
    }
    a.cluster[j] = best_c;
    ++a.counts[best_c];
    a.loss += std::max(0.0, q.neg_entropy + best);
  }
  return a;
}

// Arithmetic mean of the histograms assigned to `center`; empty when the
// cluster has no members.
inline std::vector<double> ClusterMean(const std::vector<std::vector<double>>& corpus,
                                       std::span<const uint32_t> cluster, uint32_t center) {
  std::vector<double> sum;
  size_t count = 0;
  for (size_t j = 0; j < corpus.size(); ++j) {
    if (cluster[j] != center) continue;
    if (sum.empty()) sum.assign(corpus[j].size(), 0.0);
    for (size_t s = 0; s < sum.size(); ++s) sum[s] += corpus[j][s];
    ++count;
  }
  for (double& v : sum) v /= static_cast<double>(count);
  return sum;
}

struct RefineResult {
  std::vector<Multinomial> centers;  // live centers only, real-valued
  Assignment assignment;             // final assignment against `centers`
  // Loss after each assignment step. reseeded[t] is true when centers were
  // reseeded between loss_trace[t] and loss_trace[t + 1].
  std::vector<double> loss_trace;
  std::vector<bool> reseeded;
  uint32_t iterations = 0;
  bool converged = false;
  size_t dropped = 0;  // centers removed because they ended with no members
};

// KL-divergence K-means refinement. Centers that still have no members once
// iteration stops are dropped, so every returned center codes at least one
// corpus histogram.
inline RefineResult KlKMeansRefine(const std::vector<std::vector<double>>& corpus,
                                   std::vector<Multinomial> centers, uint32_t max_iters,
                                   uint64_t seed, double epsilon = kDefaultEpsilon) {
  Require(!corpus.empty(), "cannot refine on an empty corpus");
  Require(!centers.empty(), "refinement needs at least one initial center");
  Require(max_iters >= 1, "max_iters must be at least 1");
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  RefineResult out;
  std::vector<uint32_t> previous;
  Assignment a;
  for (uint32_t it = 0; it < max_iters; ++it) {
    a = AssignToCenters(corpus, centers);
    out.loss_trace.push_back(a.loss);
    out.iterations = it + 1;
    if (it > 0 && a.cluster == previous) {
      out.converged = true;
      break;
    }
    bool reseeded = false;
    for (uint32_t c = 0; c < centers.size(); ++c) {
      if (a.counts[c] > 0) centers[c] = Smooth(ClusterMean(corpus, a.cluster, c), epsilon);
    }
    for (uint32_t c = 0; c < centers.size(); ++c) {
      if (a.counts[c] == 0) {
        centers[c] = Smooth(corpus[rng.Below(corpus.size())], epsilon);
        reseeded = true;
      }
    }
    out.reseeded.push_back(reseeded);
    previous = a.cluster;
  }
  if (!out.converged) {
    a = AssignToCenters(corpus, centers);
    out.loss_trace.push_back(a.loss);
  }
  for (uint32_t c = 0; c < centers.size(); ++c) {
    if (a.counts[c] > 0) out.centers.push_back(centers[c]);
    else ++out.dropped;
  }
  out.assignment = out.dropped > 0 ? AssignToCenters(corpus, out.centers) : a;
  return out;
}

struct TrainOptions {
  size_t clusters = kMaxDictionaryModels;
  uint64_t seed = 0;
  uint32_t max_iters = 50;
  double epsilon = kDefaultEpsilon;
  // Install the mean of the whole corpus (the best single global model) as
  // entry 0 and learn the remaining clusters - 1 entries by clustering.
  bool global_first = true;
};

struct TrainResult {
  Dictionary dictionary;
  RefineResult refine;
};

inline TrainResult TrainDictionary(const Corpus& corpus, const TrainOptions& options) {
  Require(options.clusters >= 1 && options.clusters <= kMaxDictionaryModels,
          "clusters must be in 1..255");
  Require(corpus.size() >= options.clusters, "K larger than the corpus tile count");
  std::vector<Multinomial> models;
  if (options.global_first) {
    std::vector<uint32_t> all(corpus.size(), 0);
    models.push_back(Smooth(ClusterMean(corpus.histograms, all, 0), options.epsilon));
  }
  TrainResult out;
  const size_t learned = options.clusters - models.size();
  if (learned > 0) {
    auto init = KMeansPlusPlusInit(corpus.histograms, learned, options.seed, options.epsilon);
    out.refine = KlKMeansRefine(corpus.histograms, std::move(init.centers),
                                options.max_iters, options.seed, options.epsilon);
    models.insert(models.end(), out.refine.centers.begin(), out.refine.centers.end());
  }
  out.dictionary = Dictionary::FromModels(
      corpus.alphabet, models,
      Provenance{options.seed, corpus.digest, out.refine.iterations});
  return out;
}

}  // namespace slimd

#endif  // SLIMD_KMEANS_HPP_
