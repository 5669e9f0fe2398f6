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

// slimd: train dictionaries, encode/decode code tensors, inspect bitstreams,
// generate synthetic tensors and benchmark against a global-model baseline.
//
// Exit codes: 0 success, 2 bad input, 3 dictionary mismatch, 4 corrupt or
// malformed bitstream.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "slimd/slimd.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr int kExitBadInput = 2;
constexpr int kExitWrongDictionary = 3;
constexpr int kExitCorrupt = 4;

struct CliExit {
  int code;
  std::string message;
};

// Maps a failure while reading a bitstream to its exit code.
[[noreturn]] void BitstreamFailure(const slimd::Error& e) {
  const int code = e.kind() == slimd::ErrorKind::kWrongDictionary ? kExitWrongDictionary
                   : e.kind() == slimd::ErrorKind::kInvalidArgument ? kExitBadInput
                                                                    : kExitCorrupt;
  throw CliExit{code, e.what()};
}

slimd::Dictionary LoadDictionary(const std::string& path) {
  return slimd::Dictionary::Deserialize(slimd::ReadFileBytes(path));
}

std::string Hex(uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// Expands directories to the .sltn files they contain, sorted by name.
std::vector<std::string> ExpandInputs(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    if (fs::is_directory(in)) {
      std::vector<std::string> found;
      for (const auto& entry : fs::directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().extension() == ".sltn") {
          found.push_back(entry.path().string());
        }
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(in);
    }
  }
  if (out.empty()) throw CliExit{kExitBadInput, "no input tensors"};
  return out;
}

// ---------------------------------------------------------------- gen

slimd::Alphabet ParseAlphabet(const std::string& s) {
  const auto colon = s.find(':', 1);
  if (colon == std::string::npos) throw CliExit{kExitBadInput, "alphabet must be LO:HI"};
  try {
    return slimd::Alphabet::Checked(std::stoi(s.substr(0, colon)), std::stoi(s.substr(colon + 1)));
  } catch (const std::logic_error&) {
    throw CliExit{kExitBadInput, "alphabet must be LO:HI"};
  }
}

std::array<uint32_t, 3> ParseDims(const std::string& s) {
  std::array<uint32_t, 3> d{};
  char x1 = 0, x2 = 0;
  unsigned long h = 0, w = 0, c = 0;
  std::istringstream is(s);
  if (!(is >> h >> x1 >> w >> x2 >> c) || x1 != 'x' || x2 != 'x' || !is.eof() || h == 0 ||
      w == 0 || c == 0 || h > UINT32_MAX || w > UINT32_MAX || c > UINT32_MAX) {
    throw CliExit{kExitBadInput, "dims must be HxWxC with positive sizes"};
  }
  d = {static_cast<uint32_t>(h), static_cast<uint32_t>(w), static_cast<uint32_t>(c)};
  return d;
}

slimd::SourceSpec ParseSource(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "constant") return slimd::ConstantSource{j.at("value").get<int32_t>()};
  if (kind == "iid") return slimd::IidSource{j.at("probs").get<std::vector<double>>()};
  if (kind == "laplacian") {
    return slimd::LaplacianSource{j.value("mu", 0.0), j.value("scale", 1.0)};
  }
  throw CliExit{kExitBadInput, "unknown source kind '" + kind + "'"};
}

// Inline forms: constant:V, laplacian:MU,SCALE, iid:P0,P1,...; anything
// else names a JSON file holding a source or {"regions": [...]}.
slimd::GeneratorSpec ParseGeneratorSpec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  if (colon != std::string::npos &&
      (head == "constant" || head == "laplacian" || head == "iid")) {
    std::vector<double> nums;
    std::stringstream ss(text.substr(colon + 1));
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        nums.push_back(std::stod(item));
      } catch (const std::logic_error&) {
        throw CliExit{kExitBadInput, "bad number '" + item + "' in spec"};
      }
    }
    if (head == "constant" && nums.size() == 1) {
      return slimd::ConstantSource{static_cast<int32_t>(nums[0])};
    }
    if (head == "laplacian" && nums.size() == 2) return slimd::LaplacianSource{nums[0], nums[1]};
    if (head == "iid" && !nums.empty()) return slimd::IidSource{nums};
    throw CliExit{kExitBadInput, "malformed spec '" + text + "'"};
  }
  std::ifstream in(text);
  if (!in) throw CliExit{kExitBadInput, "cannot open spec " + text};
  try {
    const json j = json::parse(in);
    if (!j.contains("regions")) {
      return std::visit([](auto s) -> slimd::GeneratorSpec { return s; }, ParseSource(j));
    }
    slimd::PatchworkSpec spec;
    for (const auto& r : j.at("regions")) {
      const auto rect = r.at("rect").get<std::vector<double>>();
      if (rect.size() != 4) throw CliExit{kExitBadInput, "rect needs [top, left, bottom, right]"};
      spec.regions.push_back({rect[0], rect[1], rect[2], rect[3], ParseSource(r.at("source"))});
    }
    return spec;
  } catch (const json::exception& e) {
    throw CliExit{kExitBadInput, std::string("bad spec JSON: ") + e.what()};
  }
}

struct GenArgs {
  std::string spec;
  std::string dims;
  std::string alphabet = "-16:16";
  uint64_t seed = 0;
  std::string output;
};

int RunGen(const GenArgs& a) {
  const auto d = ParseDims(a.dims);
  const auto t = slimd::GenerateSynthetic(ParseGeneratorSpec(a.spec), d[0], d[1], d[2],
                                          ParseAlphabet(a.alphabet), a.seed);
  slimd::SaveTensor(a.output, t);
  std::cout << "wrote " << a.output << ": " << d[0] << "x" << d[1] << "x" << d[2] << " over "
            << slimd::ToString(t.alphabet()) << "\n";
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::vector<std::string> inputs;
  size_t clusters = slimd::kMaxDictionaryModels;
  uint32_t tile_size = 16;
  uint64_t seed = 0;
  uint32_t iters = 50;
  size_t max_tiles = 0;
  bool no_global_first = false;
  std::string output;
};

int RunTrain(const TrainArgs& a) {
  std::vector<slimd::CodeTensor> tensors;
  for (const auto& path : ExpandInputs(a.inputs)) {
    try {
      tensors.push_back(slimd::LoadTensor(path));
    } catch (const slimd::Error& e) {
      throw CliExit{kExitBadInput, path + ": " + e.what()};
    }
  }
  slimd::Corpus corpus = slimd::BuildCorpus(tensors, a.tile_size);
  if (a.max_tiles > 0) corpus = slimd::SampleCorpus(corpus, a.max_tiles, a.seed);
  slimd::TrainOptions opts;
  opts.clusters = a.clusters;
  opts.seed = a.seed;
  opts.max_iters = a.iters;
  opts.global_first = !a.no_global_first;
  const auto result = slimd::TrainDictionary(corpus, opts);
  const auto& r = result.refine;
  std::cout << "corpus: " << tensors.size() << " tensors, " << corpus.size() << " tiles, digest "
            << Hex(corpus.digest) << "\n";
  for (size_t i = 0; i < r.loss_trace.size(); ++i) {
    std::cout << "iter " << i + 1 << " loss " << Fixed(r.loss_trace[i], 6) << " bits";
    if (i < r.reseeded.size() && r.reseeded[i]) std::cout << " (reseeded)";
    std::cout << "\n";
  }
  std::cout << "models: " << result.dictionary.size() << " (" << r.dropped << " dropped), "
            << (r.converged ? "converged" : "stopped") << " after " << r.iterations
            << " iterations, seed " << a.seed << "\n";
  slimd::WriteFileBytes(a.output, result.dictionary.Serialize());
  std::cout << "wrote " << a.output << " digest " << Hex(result.dictionary.digest()) << "\n";
  return 0;
}

// ---------------------------------------------------------------- encode / decode

struct CodecArgs {
  std::string input;
  std::string dictionary;
  std::string output;
  uint32_t tile_size = 16;
  double threshold = slimd::kDefaultInclusionThreshold;
  bool no_custom = false;
  bool no_fallback = false;
  bool pooled = false;
};

slimd::EncodeOptions MakeEncodeOptions(uint32_t tile_size, double threshold, bool no_custom,
                                       bool pooled, bool no_fallback) {
  slimd::EncodeOptions opts;
  opts.tile_size = tile_size;
  opts.plan.threshold = threshold;
  opts.plan.custom_enabled = !no_custom;
  opts.plan.average = pooled ? slimd::AverageMode::kPooledCounts : slimd::AverageMode::kMeanOfTiles;
  opts.global_fallback = !no_fallback;
  return opts;
}

int RunEncode(const CodecArgs& a) {
  const auto dict = LoadDictionary(a.dictionary);
  const auto t = slimd::LoadTensor(a.input);
  const auto bs = slimd::EncodeImage(
      t, dict, MakeEncodeOptions(a.tile_size, a.threshold, a.no_custom, a.pooled, a.no_fallback));
  slimd::WriteFileBytes(a.output, bs.bytes);
  size_t custom = 0;
  if (bs.plan) {
    for (const auto& c : bs.plan->custom) custom += c.has_value();
  }
  std::cout << "wrote " << a.output << ": " << bs.bytes.size() << " bytes, "
            << Fixed(8.0 * bs.bytes.size() / t.cell_count(), 4) << " bits/code, " << custom
            << "/" << t.channels() << " channels with custom models"
            << (bs.plan ? "" : " (global-model stream)") << "\n";
  return 0;
}

int RunDecode(const CodecArgs& a) {
  const auto dict = LoadDictionary(a.dictionary);
  const auto bytes = slimd::ReadFileBytes(a.input);
  std::optional<slimd::CodeTensor> t;
  try {
    t = slimd::DecodeImage(bytes, dict);
  } catch (const slimd::Error& e) {
    BitstreamFailure(e);
  }
  slimd::SaveTensor(a.output, *t);
  std::cout << "wrote " << a.output << ": " << t->height() << "x" << t->width() << "x"
            << t->channels() << "\n";
  return 0;
}

// ---------------------------------------------------------------- inspect

struct InspectArgs {
  std::string input;
  uint64_t pixels = 0;
  uint32_t downsample = 16;
};

uint64_t PixelCount(uint32_t h, uint32_t w, uint64_t pixels, uint32_t downsample) {
  return pixels > 0 ? pixels : uint64_t{h} * downsample * w * downsample;
}

int RunInspect(const InspectArgs& a) {
  const auto bytes = slimd::ReadFileBytes(a.input);
  slimd::BitstreamHeader h;
  slimd::RateBreakdown r;
  try {
    h = slimd::ParseHeader(bytes);
    r = slimd::RateReport(bytes, PixelCount(h.height, h.width, a.pixels, a.downsample));
  } catch (const slimd::Error& e) {
    BitstreamFailure(e);
  }
  std::cout << "version        " << h.version << "\n"
            << "dims           " << h.height << "x" << h.width << "x" << h.channels << "\n"
            << "alphabet       " << slimd::ToString(h.alphabet) << "\n"
            << "tile size      "
            << (h.global_model() ? std::string("global model") : std::to_string(h.tile_size))
            << "\n"
            << "threshold      " << Fixed(h.threshold_micros / 1e6, 6) << "\n"
            << "dictionary     " << Hex(h.dictionary_digest) << "\n"
            << "header bits    " << r.header_bits << "\n"
            << "index bits     " << r.index_bits << "\n"
            << "custom bits    " << r.custom_bits << "\n"
            << "payload bits   " << r.payload_bits << "\n"
            << "total bits     " << r.total_bits() << " (" << bytes.size() << " bytes)\n"
            << "pixels         " << r.pixel_count << "\n"
            << "bpp            " << Fixed(r.bpp(), 6) << "\n";
  return 0;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::vector<std::string> inputs;
  std::string dictionary;
  size_t global_index = 0;
  uint32_t tile_size = 16;
  double threshold = slimd::kDefaultInclusionThreshold;
  bool no_custom = false;
  bool no_fallback = false;
  uint64_t pixels = 0;
  uint32_t downsample = 16;
  std::string output;
};

int RunBench(const BenchArgs& a) {
  const auto dict = LoadDictionary(a.dictionary);
  if (a.global_index >= dict.size()) {
    throw CliExit{kExitBadInput, "--global-model-index " + std::to_string(a.global_index) +
                                     " outside a " + std::to_string(dict.size()) +
                                     "-model dictionary"};
  }
  const auto global = slimd::Dictionary::FromTables(dict.alphabet(), {dict.table(a.global_index)});
  const auto opts = MakeEncodeOptions(a.tile_size, a.threshold, a.no_custom, false, a.no_fallback);
  std::ofstream records;
  if (!a.output.empty()) {
    records.open(a.output);
    if (!records) throw CliExit{kExitBadInput, "cannot write " + a.output};
  }

  std::printf("%-32s %14s %14s %9s %9s %8s\n", "input", "baseline_bits", "slimd_bits",
              "savings%", "side%", "custom");
  uint64_t total_base = 0, total_slimd = 0;
  double savings_sum = 0.0;
  const auto inputs = ExpandInputs(a.inputs);
  for (const auto& path : inputs) {
    slimd::CodeTensor t = slimd::LoadTensor(path);
    const auto bs = slimd::EncodeImage(t, dict, opts);
    const auto base = slimd::EncodeGlobalBaseline(t, global);
    if (!(slimd::DecodeImage(bs, dict) == t) || !(slimd::DecodeImage(base, global) == t)) {
      throw CliExit{kExitCorrupt, path + ": round trip mismatch"};
    }
    const uint64_t pixels = PixelCount(t.height(), t.width(), a.pixels, a.downsample);
    const auto r = slimd::RateReport(bs, pixels);
    const auto rb = slimd::RateReport(base, pixels);
    const double savings = 100.0 * (1.0 - static_cast<double>(r.total_bits()) / rb.total_bits());
    const double side = 100.0 * static_cast<double>(r.side_info_bits()) / r.total_bits();
    std::vector<int> custom;
    for (const auto& c : r.channels) custom.push_back(c.emitted ? 1 : 0);
    const int custom_count = std::accumulate(custom.begin(), custom.end(), 0);
    total_base += rb.total_bits();
    total_slimd += r.total_bits();
    savings_sum += savings;
    std::printf("%-32s %14llu %14llu %9.3f %9.3f %4d/%-4u\n",
                fs::path(path).filename().string().c_str(),
                static_cast<unsigned long long>(rb.total_bits()),
                static_cast<unsigned long long>(r.total_bits()), savings, side, custom_count,
                t.channels());
    if (records.is_open()) {
      json rec = {{"input", path},
                  {"cells", t.cell_count()},
                  {"pixels", pixels},
                  {"baseline_bits", rb.total_bits()},
                  {"slimd_bits", r.total_bits()},
                  {"savings_percent", savings},
                  {"baseline_bpp", rb.bpp()},
                  {"slimd_bpp", r.bpp()},
                  {"header_bits", r.header_bits},
                  {"index_bits", r.index_bits},
                  {"custom_bits", r.custom_bits},
                  {"payload_bits", r.payload_bits},
                  {"side_info_bits", r.side_info_bits()},
                  {"side_info_share", static_cast<double>(r.side_info_bits()) / r.total_bits()},
                  {"custom_channels", custom}};
      records << rec.dump() << "\n";
    }
  }
  const double aggregate = 100.0 * (1.0 - static_cast<double>(total_slimd) / total_base);
  const double mean = savings_sum / static_cast<double>(inputs.size());
  std::printf("%-32s %14llu %14llu %9.3f\n", "total", static_cast<unsigned long long>(total_base),
              static_cast<unsigned long long>(total_slimd), aggregate);
  std::printf("mean savings %.3f%% over %zu inputs (baseline: model %zu, header bits only)\n",
              mean, inputs.size(), a.global_index);
  if (records.is_open()) {
    records << json{{"aggregate", true},
                    {"inputs", inputs.size()},
                    {"baseline_bits", total_base},
                    {"slimd_bits", total_slimd},
                    {"savings_percent", aggregate},
                    {"mean_savings_percent", mean}}
                   .dump()
            << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SLIMD: tile-adaptive entropy coding of code tensors"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic code tensor");
  gen_cmd->add_option("--spec", gen.spec,
                      "constant:V, laplacian:MU,SCALE, iid:P0,P1,... or a JSON file")
      ->required();
  gen_cmd->add_option("--dims", gen.dims, "HxWxC")->required();
  gen_cmd->add_option("--alphabet", gen.alphabet, "LO:HI (default -16:16)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("-o,--output", gen.output, "Tensor file to write")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Learn a dictionary from tensor files");
  train_cmd->add_option("inputs", train.inputs, "Tensor files or directories of .sltn files")
      ->required();
  train_cmd->add_option("--clusters", train.clusters, "Dictionary size K (1..255)")
      ->check(CLI::Range(1, 255));
  train_cmd->add_option("--tile-size", train.tile_size, "Tile edge length")
      ->check(CLI::Range(1, 65535));
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--iters", train.iters, "Maximum refinement iterations")
      ->check(CLI::Range(1, 1000000));
  train_cmd->add_option("--max-tiles", train.max_tiles,
                        "Train on a random sample of this many tiles (0 = all)");
  train_cmd->add_flag("--no-global-first", train.no_global_first,
                      "Do not install the corpus mean as model 0");
  train_cmd->add_option("-o,--output", train.output, "Dictionary file to write")->required();

  CodecArgs enc;
  auto* enc_cmd = app.add_subcommand("encode", "Encode a tensor file");
  enc_cmd->add_option("input", enc.input, "Tensor file")->required();
  enc_cmd->add_option("-d,--dictionary", enc.dictionary, "Dictionary file")->required();
  enc_cmd->add_option("--tile-size", enc.tile_size, "Tile edge length")
      ->check(CLI::Range(1, 65535));
  enc_cmd->add_option("--threshold", enc.threshold, "Custom-model inclusion threshold")
      ->check(CLI::Range(0.0, 4294.0));
  enc_cmd->add_flag("--no-custom", enc.no_custom, "Never send custom distributions");
  enc_cmd->add_flag("--pooled", enc.pooled, "Pool tile counts for the custom estimate");
  enc_cmd->add_flag("--no-fallback", enc.no_fallback, "Always write the tiled stream");
  enc_cmd->add_option("-o,--output", enc.output, "Bitstream file to write")->required();

  CodecArgs dec;
  auto* dec_cmd = app.add_subcommand("decode", "Decode a bitstream file");
  dec_cmd->add_option("input", dec.input, "Bitstream file")->required();
  dec_cmd->add_option("-d,--dictionary", dec.dictionary, "Dictionary file")->required();
  dec_cmd->add_option("-o,--output", dec.output, "Tensor file to write")->required();

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the rate breakdown of a bitstream");
  inspect_cmd->add_option("input", inspect.input, "Bitstream file")->required();
  inspect_cmd->add_option("--pixels", inspect.pixels, "Pixel count for bpp");
  inspect_cmd->add_option("--downsample", inspect.downsample,
                          "Pixels per code along each axis when --pixels is absent")
      ->check(CLI::Range(1, 65535));

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Compare against a single global model");
  bench_cmd->add_option("inputs", bench.inputs, "Tensor files or directories")->required();
  bench_cmd->add_option("-d,--dictionary", bench.dictionary, "Dictionary file")->required();
  bench_cmd->add_option("--global-model-index", bench.global_index,
                        "Dictionary entry used by the baseline");
  bench_cmd->add_option("--tile-size", bench.tile_size, "Tile edge length")
      ->check(CLI::Range(1, 65535));
  bench_cmd->add_option("--threshold", bench.threshold, "Custom-model inclusion threshold")
      ->check(CLI::Range(0.0, 4294.0));
  bench_cmd->add_flag("--no-custom", bench.no_custom, "Never send custom distributions");
  bench_cmd->add_flag("--no-fallback", bench.no_fallback, "Always write the tiled stream");
  bench_cmd->add_option("--pixels", bench.pixels, "Pixel count per input for bpp");
  bench_cmd->add_option("--downsample", bench.downsample,
                        "Pixels per code along each axis when --pixels is absent")
      ->check(CLI::Range(1, 65535));
  bench_cmd->add_option("-o,--output", bench.output, "JSON-lines record file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*gen_cmd) return RunGen(gen);
    if (*train_cmd) return RunTrain(train);
    if (*enc_cmd) return RunEncode(enc);
    if (*dec_cmd) return RunDecode(dec);
    if (*inspect_cmd) return RunInspect(inspect);
    if (*bench_cmd) return RunBench(bench);
  } catch (const CliExit& e) {
    std::cerr << "slimd: " << e.message << "\n";
    return e.code;
  } catch (const slimd::Error& e) {
    std::cerr << "slimd: " << e.what() << "\n";
    return e.kind() == slimd::ErrorKind::kWrongDictionary ? kExitWrongDictionary : kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "slimd: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitBadInput;
}
