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

// Trains a small dictionary on synthetic patchwork tensors, encodes a fresh
// tensor with it and checks that decoding gives the input back.

#include <cstdio>
#include <vector>

#include "slimd/slimd.hpp"

int main() {
  const slimd::Alphabet alphabet{-16, 16};

  slimd::PatchworkSpec spec;
  spec.regions.push_back({0.0, 0.0, 1.0, 1.0, slimd::LaplacianSource{0.0, 1.5}});
  spec.regions.push_back({0.0, 0.5, 0.5, 1.0, slimd::LaplacianSource{5.0, 0.8}});
  spec.regions.push_back({0.5, 0.0, 1.0, 0.5, slimd::ConstantSource{-2}});

  std::vector<slimd::CodeTensor> training;
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    training.push_back(slimd::GenerateSynthetic(spec, 64, 64, 32, alphabet, seed));
  }
  slimd::TrainOptions options;
  options.clusters = 16;
  options.seed = 7;
  const auto trained = slimd::TrainDictionary(slimd::BuildCorpus(training, 16), options);
  const slimd::Dictionary& dict = trained.dictionary;

  const auto image = slimd::GenerateSynthetic(spec, 64, 64, 32, alphabet, 100);
  const auto stream = slimd::EncodeImage(image, dict);
  const auto baseline = slimd::EncodeGlobalBaseline(image, dict);
  if (!(slimd::DecodeImage(stream, dict) == image)) {
    std::fprintf(stderr, "round trip mismatch\n");
    return 1;
  }

  const uint64_t pixels = 64 * 16 * 64 * 16;
  const auto rate = slimd::RateReport(stream, pixels);
  const auto base = slimd::RateReport(baseline, pixels);
  std::printf("models      %zu\n", dict.size());
  std::printf("slimd       %llu bits (%.4f bpp, side info %llu bits)\n",
              static_cast<unsigned long long>(rate.total_bits()), rate.bpp(),
              static_cast<unsigned long long>(rate.side_info_bits()));
  std::printf("baseline    %llu bits (%.4f bpp)\n",
              static_cast<unsigned long long>(base.total_bits()), base.bpp());
  std::printf("savings     %.2f%%\n",
              100.0 * (1.0 - static_cast<double>(rate.total_bits()) / base.total_bits()));
  return 0;
}
