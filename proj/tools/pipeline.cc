// Copyright 2026 The dpgemb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <tuple>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dpgemb/eval.h"
#include "dpgemb/graph.h"
#include "dpgemb/rdp_accountant.h"
#include "dpgemb/sampler.h"

#ifndef DPGEMB_VERSION
#define DPGEMB_VERSION "unknown"
#endif

namespace dpgemb::cli {
namespace fs = std::filesystem;

namespace {

constexpr char kProximityCacheFile[] = "proximity.cache";
constexpr char kSubgraphCacheFile[] = "subgraphs.cache";
constexpr char kLossTraceFile[] = "loss.csv";

const std::vector<std::string> kMetricsHeader = {"run_id", "epsilon", "mode",   "proximity",
                                                 "metric", "mean",    "stddev", "seeds",
                                                 "version"};

absl::Status KeyError(const std::string& key, const std::string& value, const char* expected) {
  return absl::InvalidArgumentError(
      absl::StrCat("config key '", key, "': cannot parse '", value, "' as ", expected));
}

absl::StatusOr<double> ParseDouble(const std::string& key, const std::string& value) {
  double out = 0.0;
  if (!absl::SimpleAtod(value, &out)) return KeyError(key, value, "a number");
  return out;
}

absl::StatusOr<std::uint64_t> ParseUint(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  if (!absl::SimpleAtoi(value, &out)) return KeyError(key, value, "a nonnegative integer");
  return out;
}

absl::StatusOr<bool> ParseBool(const std::string& key, const std::string& value) {
  bool out = false;
  if (!absl::SimpleAtob(value, &out)) return KeyError(key, value, "a boolean");
  return out;
}

// Accepts "1,2,5" and inclusive ranges such as "1-10".
absl::StatusOr<std::vector<std::uint64_t>> ParseSeedList(const std::string& key,
                                                         const std::string& value) {
  std::vector<std::uint64_t> seeds;
  for (absl::string_view part : absl::StrSplit(value, ',', absl::SkipWhitespace())) {
    part = absl::StripAsciiWhitespace(part);
    std::vector<std::string> bounds = absl::StrSplit(part, '-');
    std::uint64_t lo = 0, hi = 0;
    if (bounds.size() == 1 && absl::SimpleAtoi(bounds[0], &lo)) {
      seeds.push_back(lo);
    } else if (bounds.size() == 2 && absl::SimpleAtoi(bounds[0], &lo) &&
               absl::SimpleAtoi(bounds[1], &hi) && lo <= hi) {
      for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      return KeyError(key, value, "a seed list such as 1,2,3 or 1-10");
    }
  }
  if (seeds.empty()) return KeyError(key, value, "a nonempty seed list");
  return seeds;
}

absl::StatusOr<std::vector<double>> ParseDoubleList(const std::string& key,
                                                    const std::string& value) {
  std::vector<double> out;
  for (absl::string_view part : absl::StrSplit(value, ',', absl::SkipWhitespace())) {
    double v = 0.0;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(part), &v)) {
      return KeyError(key, value, "a comma-separated list of numbers");
    }
    out.push_back(v);
  }
  if (out.empty()) return KeyError(key, value, "a nonempty list");
  return out;
}

absl::StatusOr<std::vector<PerturbationMode>> ParseModeList(const std::string& value) {
  std::vector<PerturbationMode> out;
  for (absl::string_view part : absl::StrSplit(value, ',', absl::SkipWhitespace())) {
    auto mode = ParsePerturbationMode(std::string(absl::StripAsciiWhitespace(part)));
    if (!mode.ok()) return mode.status();
    out.push_back(*mode);
  }
  if (out.empty()) return absl::InvalidArgumentError("config key 'modes' is empty");
  return out;
}

std::string JoinDoubles(const std::vector<double>& values) {
  std::vector<std::string> parts;
  for (double v : values) parts.push_back(FormatDouble(v));
  return absl::StrJoin(parts, ",");
}

std::string BoolString(bool value) { return value ? "true" : "false"; }

std::string EpsilonLabel(const RunConfig& config) {
  return config.train.mode == PerturbationMode::kNoNoise ? "inf"
                                                        : FormatDouble(config.train.eps_target);
}

// The graph training runs on, plus the held-out split for link prediction.
struct PreparedGraph {
  Graph full;
  Graph train;
  std::optional<LinkSplit> split;
};

absl::StatusOr<PreparedGraph> PrepareGraph(const RunConfig& config) {
  if (config.input.empty()) return absl::InvalidArgumentError("config key 'input' is required");
  LoadOptions options;
  options.relabel = config.relabel;
  options.declared_num_nodes = config.num_nodes;
  auto loaded = LoadEdgeListFile(config.input, options);
  if (!loaded.ok()) return loaded.status();
  PreparedGraph prepared;
  prepared.full = std::move(loaded->graph);
  if (config.task == Task::kLinkPred) {
    auto split = SplitLinks(prepared.full, config.test_fraction, config.split_seed);
    if (!split.ok()) return split.status();
    prepared.train = split->train_graph;
    prepared.split = *std::move(split);
  } else {
    prepared.train = prepared.full;
  }
  return prepared;
}

absl::StatusOr<ProximityMatrix> ComputeProximity(const RunConfig& config, const Graph& graph) {
  if (config.proximity == ProximityKind::kDegree) return DegreeProximity(graph);
  return DeepWalkProximity(graph, config.window);
}

std::string EmbeddingExtension(EmbeddingFormat format) {
  return format == EmbeddingFormat::kBinary ? ".bin" : ".txt";
}

double SampleStddev(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string_view TaskName(Task task) {
  return task == Task::kLinkPred ? "linkpred" : "strucequ";
}

std::string Version() { return DPGEMB_VERSION; }

const std::vector<std::string>& ConfigKeys() {
  static const auto* keys = new std::vector<std::string>{
      "input",    "relabel",     "num_nodes",     "proximity",       "window",
      "eta",      "B",           "C",             "sigma",           "k",
      "r",        "epochs",      "eps",           "delta",           "sensitivity",
      "mode",     "weighting",   "positives",     "reject_neighbors", "resample",
      "releases_per_epoch",      "seed",          "task",            "test_fraction",
      "split_seed", "out",       "metrics",       "format",          "run_id",
      "proximity_cache",         "subgraph_cache", "seeds",          "eps_grid",
      "modes"};
  return *keys;
}

absl::StatusOr<KeyValues> ResolveConfig(const std::string& config_path, const KeyValues& flags,
                                        const char* (*getenv)(const char*)) {
  KeyValues merged;
  if (!config_path.empty()) {
    auto file = ReadKeyValueFile(config_path);
    if (!file.ok()) return file.status();
    merged = *std::move(file);
  }
  for (const std::string& key : ConfigKeys()) {
    const std::string name = absl::StrCat(kEnvPrefix, absl::AsciiStrToUpper(key));
    const char* value = getenv ? getenv(name.c_str()) : std::getenv(name.c_str());
    if (value != nullptr) merged[key] = value;
  }
  for (const auto& [key, value] : flags) merged[key] = value;
  return merged;
}

absl::StatusOr<RunConfig> ParseRunConfig(const KeyValues& values) {
  RunConfig config;
  TrainConfig& train = config.train;
  const auto& known = ConfigKeys();
  for (const auto& [key, value] : values) {
    if (absl::StartsWith(key, kRunKeyPrefix)) continue;
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      return absl::InvalidArgumentError(absl::StrCat("unknown config key '", key, "'"));
    }
    absl::Status st;
    auto set_double = [&](double& field) {
      auto v = ParseDouble(key, value);
      if (v.ok()) field = *v;
      st = v.status();
    };
    auto set_size = [&](std::size_t& field) {
      auto v = ParseUint(key, value);
      if (v.ok()) field = *v;
      st = v.status();
    };
    auto set_bool = [&](bool& field) {
      auto v = ParseBool(key, value);
      if (v.ok()) field = *v;
      st = v.status();
    };
    if (key == "input") {
      config.input = value;
    } else if (key == "relabel") {
      set_bool(config.relabel);
    } else if (key == "num_nodes") {
      if (!value.empty()) {
        std::size_t n = 0;
        set_size(n);
        config.num_nodes = n;
      }
    } else if (key == "proximity") {
      auto kind = ParseProximityKind(value);
      if (kind.ok()) config.proximity = *kind;
      st = kind.status();
    } else if (key == "window") {
      set_size(config.window);
    } else if (key == "eta") {
      set_double(train.eta);
    } else if (key == "B") {
      set_size(train.batch_size);
    } else if (key == "C") {
      set_double(train.clip);
    } else if (key == "sigma") {
      set_double(train.sigma);
    } else if (key == "k") {
      set_size(train.k);
    } else if (key == "r") {
      set_size(train.dim);
    } else if (key == "epochs") {
      set_size(train.max_epochs);
      config.epochs_set = true;
    } else if (key == "eps") {
      set_double(train.eps_target);
    } else if (key == "delta") {
      set_double(train.delta);
    } else if (key == "sensitivity") {
      if (!value.empty()) {
        double s = 0.0;
        set_double(s);
        train.sensitivity = s;
      }
    } else if (key == "mode") {
      auto mode = ParsePerturbationMode(value);
      if (mode.ok()) train.mode = *mode;
      st = mode.status();
    } else if (key == "weighting") {
      auto w = ParseNegativeWeighting(value);
      if (w.ok()) train.neg_weighting = *w;
      st = w.status();
    } else if (key == "positives") {
      auto p = ParsePositiveSet(value);
      if (p.ok()) train.positives = *p;
      st = p.status();
    } else if (key == "reject_neighbors") {
      set_bool(train.reject_neighbors);
    } else if (key == "resample") {
      set_bool(train.resample_negatives);
    } else if (key == "releases_per_epoch") {
      std::size_t r = 0;
      set_size(r);
      train.releases_per_epoch = static_cast<int>(r);
    } else if (key == "seed") {
      auto v = ParseUint(key, value);
      if (v.ok()) train.seed = *v;
      st = v.status();
    } else if (key == "task") {
      if (value == "strucequ") {
        config.task = Task::kStrucEqu;
      } else if (value == "linkpred") {
        config.task = Task::kLinkPred;
      } else {
        st = KeyError(key, value, "'strucequ' or 'linkpred'");
      }
    } else if (key == "test_fraction") {
      set_double(config.test_fraction);
    } else if (key == "split_seed") {
      auto v = ParseUint(key, value);
      if (v.ok()) config.split_seed = *v;
      st = v.status();
    } else if (key == "out") {
      config.out = value;
    } else if (key == "metrics") {
      config.metrics = value;
    } else if (key == "format") {
      if (value == "text") {
        config.format = EmbeddingFormat::kText;
      } else if (value == "binary") {
        config.format = EmbeddingFormat::kBinary;
      } else {
        st = KeyError(key, value, "'text' or 'binary'");
      }
    } else if (key == "run_id") {
      config.run_id = value;
    } else if (key == "proximity_cache") {
      config.proximity_cache = value;
    } else if (key == "subgraph_cache") {
      config.subgraph_cache = value;
    } else if (key == "seeds") {
      auto seeds = ParseSeedList(key, value);
      if (seeds.ok()) config.seeds = *std::move(seeds);
      st = seeds.status();
    } else if (key == "eps_grid") {
      auto grid = ParseDoubleList(key, value);
      if (grid.ok()) config.eps_grid = *std::move(grid);
      st = grid.status();
    } else if (key == "modes") {
      auto modes = ParseModeList(value);
      if (modes.ok()) config.modes = *std::move(modes);
      st = modes.status();
    }
    if (!st.ok()) return st;
  }
  if (!config.epochs_set) {
    train.max_epochs = config.task == Task::kLinkPred ? kLinkPredEpochs : kStrucEquEpochs;
  }
  if (!(config.test_fraction > 0.0 && config.test_fraction < 1.0)) {
    return absl::InvalidArgumentError("test_fraction must lie in (0, 1)");
  }
  if (auto st = train.Validate(); !st.ok()) return st;
  return config;
}

KeyValues ConfigSnapshot(const RunConfig& config) {
  const TrainConfig& t = config.train;
  KeyValues kv;
  kv["input"] = config.input;
  kv["relabel"] = BoolString(config.relabel);
  kv["num_nodes"] = config.num_nodes ? absl::StrCat(*config.num_nodes) : "";
  kv["proximity"] = std::string(ProximityKindName(config.proximity));
  kv["window"] = absl::StrCat(config.window);
  kv["eta"] = FormatDouble(t.eta);
  kv["B"] = absl::StrCat(t.batch_size);
  kv["C"] = FormatDouble(t.clip);
  kv["sigma"] = FormatDouble(t.sigma);
  kv["k"] = absl::StrCat(t.k);
  kv["r"] = absl::StrCat(t.dim);
  kv["epochs"] = absl::StrCat(t.max_epochs);
  kv["eps"] = FormatDouble(t.eps_target);
  kv["delta"] = FormatDouble(t.delta);
  kv["sensitivity"] = t.sensitivity ? FormatDouble(*t.sensitivity) : "";
  kv["mode"] = std::string(PerturbationModeName(t.mode));
  kv["weighting"] = std::string(NegativeWeightingName(t.neg_weighting));
  kv["positives"] = std::string(PositiveSetName(t.positives));
  kv["reject_neighbors"] = BoolString(t.reject_neighbors);
  kv["resample"] = BoolString(t.resample_negatives);
  kv["releases_per_epoch"] = absl::StrCat(t.releases_per_epoch);
  kv["seed"] = absl::StrCat(t.seed);
  kv["task"] = std::string(TaskName(config.task));
  kv["test_fraction"] = FormatDouble(config.test_fraction);
  kv["split_seed"] = absl::StrCat(config.split_seed);
  kv["out"] = config.out;
  kv["metrics"] = config.metrics;
  kv["format"] = config.format == EmbeddingFormat::kBinary ? "binary" : "text";
  kv["run_id"] = config.run_id;
  kv["proximity_cache"] = config.proximity_cache;
  kv["subgraph_cache"] = config.subgraph_cache;
  kv["seeds"] = absl::StrJoin(config.seeds, ",");
  kv["eps_grid"] = JoinDoubles(config.eps_grid);
  std::vector<std::string> modes;
  for (PerturbationMode m : config.modes) modes.emplace_back(PerturbationModeName(m));
  kv["modes"] = absl::StrJoin(modes, ",");
  return kv;
}

KeyValues RunManifest::ToKeyValues() const {
  KeyValues kv = config;
  auto put = [&](const char* key, std::string value) {
    kv[absl::StrCat(kRunKeyPrefix, key)] = std::move(value);
  };
  put("version", version);
  put("id", run_id);
  put("seed", absl::StrCat(seed));
  put("input_sha256", input_sha256);
  put("proximity_cache_sha256", proximity_cache_sha256);
  put("subgraph_cache_sha256", subgraph_cache_sha256);
  put("w_in", w_in);
  put("w_out", w_out);
  put("loss_trace", loss_trace);
  put("w_in_sha256", w_in_sha256);
  put("w_out_sha256", w_out_sha256);
  put("epochs_completed", absl::StrCat(report.epochs_completed));
  put("stopped_by_budget", BoolString(report.stopped_by_budget));
  put("gamma", FormatDouble(report.gamma));
  put("sensitivity", FormatDouble(report.sensitivity));
  put("sigma", FormatDouble(report.sigma));
  put("epsilon", FormatDouble(report.epsilon));
  put("delta", FormatDouble(delta));
  put("alpha", absl::StrCat(report.alpha));
  put("delta_hat", FormatDouble(report.delta_hat));
  return kv;
}

absl::StatusOr<RunManifest> RunManifest::FromKeyValues(const KeyValues& values) {
  RunManifest m;
  auto get = [&](const char* key) -> absl::StatusOr<std::string> {
    auto it = values.find(absl::StrCat(kRunKeyPrefix, key));
    if (it == values.end()) {
      return absl::DataLossError(absl::StrCat("manifest lacks '", kRunKeyPrefix, key, "'"));
    }
    return it->second;
  };
  for (const auto& [key, value] : values) {
    if (!absl::StartsWith(key, kRunKeyPrefix)) m.config[key] = value;
  }
  struct Field {
    const char* key;
    std::string* target;
  };
  for (const Field& f : {Field{"version", &m.version}, Field{"id", &m.run_id},
                         Field{"input_sha256", &m.input_sha256},
                         Field{"proximity_cache_sha256", &m.proximity_cache_sha256},
                         Field{"subgraph_cache_sha256", &m.subgraph_cache_sha256},
                         Field{"w_in", &m.w_in}, Field{"w_out", &m.w_out},
                         Field{"loss_trace", &m.loss_trace},
                         Field{"w_in_sha256", &m.w_in_sha256},
                         Field{"w_out_sha256", &m.w_out_sha256}}) {
    auto v = get(f.key);
    if (!v.ok()) return v.status();
    *f.target = *std::move(v);
  }
  auto number = [&](const char* key) -> absl::StatusOr<double> {
    auto v = get(key);
    if (!v.ok()) return v.status();
    if (*v == "inf") return std::numeric_limits<double>::infinity();
    return ParseDouble(absl::StrCat(kRunKeyPrefix, key), *v);
  };
  auto seed = get("seed");
  auto epochs = get("epochs_completed");
  auto stopped = get("stopped_by_budget");
  auto alpha = get("alpha");
  auto gamma = number("gamma");
  auto sensitivity = number("sensitivity");
  auto sigma = number("sigma");
  auto epsilon = number("epsilon");
  auto delta = number("delta");
  auto delta_hat = number("delta_hat");
  for (const absl::Status& st :
       {seed.status(), epochs.status(), stopped.status(), alpha.status(), gamma.status(),
        sensitivity.status(), sigma.status(), epsilon.status(), delta.status(),
        delta_hat.status()}) {
    if (!st.ok()) return st;
  }
  int alpha_value = 0;
  if (!absl::SimpleAtoi(*seed, &m.seed) ||
      !absl::SimpleAtoi(*epochs, &m.report.epochs_completed) ||
      !absl::SimpleAtob(*stopped, &m.report.stopped_by_budget) ||
      !absl::SimpleAtoi(*alpha, &alpha_value)) {
    return absl::DataLossError("manifest has malformed run fields");
  }
  m.report.alpha = alpha_value;
  m.report.gamma = *gamma;
  m.report.sensitivity = *sensitivity;
  m.report.sigma = *sigma;
  m.report.epsilon = *epsilon;
  m.report.delta_hat = *delta_hat;
  m.delta = *delta;
  return m;
}

absl::StatusOr<RunManifest> ReadManifest(const std::string& run_dir) {
  const fs::path path = fs::path(run_dir) / kManifestFile;
  if (!fs::exists(path)) {
    return absl::FailedPreconditionError(
        absl::StrCat("no ", kManifestFile, " in ", run_dir,
                     "; refusing to evaluate embeddings without provenance"));
  }
  auto kv = ReadKeyValueFile(path.string());
  if (!kv.ok()) return kv.status();
  return RunManifest::FromKeyValues(*kv);
}

absl::Status CmdPrep(const RunConfig& config, std::ostream& out) {
  auto prepared = PrepareGraph(config);
  if (!prepared.ok()) return prepared.status();
  const Graph& graph = prepared->train;
  out << "nodes=" << graph.num_nodes() << " edges=" << graph.num_edges() << "\n";
  auto proximity = ComputeProximity(config, graph);
  if (!proximity.ok()) return proximity.status();
  out << "min(P)=" << FormatDouble(proximity->min_positive()) << "\n";
  double w_lo = std::numeric_limits<double>::infinity(), w_hi = 0.0;
  for (double w : NegativeWeightsFor(*proximity, config.train.neg_weighting)) {
    if (w <= 0.0) continue;
    w_lo = std::min(w_lo, w);
    w_hi = std::max(w_hi, w);
  }
  out << "negative_weight_range=[" << FormatDouble(w_lo) << ", " << FormatDouble(w_hi) << "]\n";
  const auto violations = SamplingMassViolations(*proximity);
  if (!violations.empty()) {
    out << "warning: " << violations.size()
        << " node(s) have min(P)/rowsum >= 1 or an empty proximity row\n";
  }
  out.flush();

  auto samples = GenerateSubgraphs(graph, config.train.Sampler(), &*proximity);
  if (!samples.ok()) return samples.status();
  out << "subgraphs=" << samples->size() << "\n";
  out << "gamma=" << FormatDouble(static_cast<double>(config.train.batch_size) /
                                  static_cast<double>(samples->size()))
      << "\n";

  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", config.out));
  const std::string prox_path = (fs::path(config.out) / kProximityCacheFile).string();
  const std::string sub_path = (fs::path(config.out) / kSubgraphCacheFile).string();
  if (auto st = WriteProximityCache(*proximity, prox_path); !st.ok()) return st;
  if (auto st = WriteSubgraphCache(*samples, sub_path); !st.ok()) return st;
  out << "wrote " << prox_path << "\nwrote " << sub_path << "\n";
  return absl::OkStatus();
}

absl::StatusOr<RunManifest> CmdTrain(const RunConfig& config, std::ostream& out) {
  auto prepared = PrepareGraph(config);
  if (!prepared.ok()) return prepared.status();
  const Graph& graph = prepared->train;

  RunManifest manifest;
  auto input_digest = Sha256File(config.input);
  if (!input_digest.ok()) return input_digest.status();
  manifest.input_sha256 = *input_digest;

  absl::StatusOr<ProximityMatrix> proximity;
  if (!config.proximity_cache.empty()) {
    proximity = ReadProximityCache(config.proximity_cache);
    if (proximity.ok() && proximity->num_nodes() != graph.num_nodes()) {
      return absl::InvalidArgumentError("proximity cache does not match the graph size");
    }
    auto digest = Sha256File(config.proximity_cache);
    if (!digest.ok()) return digest.status();
    manifest.proximity_cache_sha256 = *digest;
  } else {
    proximity = ComputeProximity(config, graph);
  }
  if (!proximity.ok()) return proximity.status();

  absl::StatusOr<TrainResult> result;
  if (!config.subgraph_cache.empty()) {
    auto samples = ReadSubgraphCache(config.subgraph_cache);
    if (!samples.ok()) return samples.status();
    auto digest = Sha256File(config.subgraph_cache);
    if (!digest.ok()) return digest.status();
    manifest.subgraph_cache_sha256 = *digest;
    result = Train(graph, *proximity, *std::move(samples), config.train);
  } else {
    result = Train(graph, *proximity, config.train);
  }
  if (!result.ok()) return result.status();

  std::error_code ec;
  fs::create_directories(config.out, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", config.out));
  const std::string ext = EmbeddingExtension(config.format);
  manifest.w_in = "w_in" + ext;
  manifest.w_out = "w_out" + ext;
  manifest.loss_trace = kLossTraceFile;
  const fs::path dir(config.out);
  const std::string w_in_path = (dir / manifest.w_in).string();
  const std::string w_out_path = (dir / manifest.w_out).string();
  if (auto st = WriteEmbedding(result->model.w_in, w_in_path, config.format); !st.ok()) return st;
  if (auto st = WriteEmbedding(result->model.w_out, w_out_path, config.format); !st.ok()) {
    return st;
  }
  {
    std::ofstream trace(dir / kLossTraceFile, std::ios::trunc);
    trace << "epoch,loss\n";
    for (std::size_t e = 0; e < result->report.loss_trace.size(); ++e) {
      trace << e << "," << FormatDouble(result->report.loss_trace[e]) << "\n";
    }
    if (!trace) return absl::DataLossError("cannot write loss trace");
  }
  auto w_in_digest = Sha256File(w_in_path);
  auto w_out_digest = Sha256File(w_out_path);
  if (!w_in_digest.ok()) return w_in_digest.status();
  if (!w_out_digest.ok()) return w_out_digest.status();
  manifest.w_in_sha256 = *w_in_digest;
  manifest.w_out_sha256 = *w_out_digest;

  RunConfig snapshot = config;
  snapshot.input = fs::absolute(config.input).string();
  manifest.config = ConfigSnapshot(snapshot);
  manifest.version = Version();
  manifest.seed = config.train.seed;
  manifest.run_id = config.run_id.empty()
                        ? absl::StrCat(std::string(ProximityKindName(config.proximity)), "-",
                                       std::string(PerturbationModeName(config.train.mode)),
                                       "-eps",
                                       EpsilonLabel(config), "-seed", config.train.seed)
                        : config.run_id;
  manifest.report = result->report;
  manifest.report.loss_trace.clear();
  manifest.delta = config.train.delta;
  if (auto st = WriteKeyValueFile(manifest.ToKeyValues(), (dir / kManifestFile).string());
      !st.ok()) {
    return st;
  }

  const RunReport& r = result->report;
  out << "run " << manifest.run_id << ": epochs=" << r.epochs_completed
      << " stopped_by_budget=" << BoolString(r.stopped_by_budget)
      << " gamma=" << FormatDouble(r.gamma);
  if (config.train.mode != PerturbationMode::kNoNoise) {
    out << " epsilon=" << FormatDouble(r.epsilon) << " alpha=" << r.alpha
        << " delta=" << FormatDouble(config.train.delta)
        << " delta_hat=" << FormatDouble(r.delta_hat);
  }
  out << " final_loss=" << (r.loss_trace.empty() ? "nan" : FormatDouble(r.loss_trace.back()))
      << "\n";
  return manifest;
}

absl::Status CmdEval(const RunConfig& config, const std::vector<std::string>& run_dirs,
                     std::ostream& out) {
  if (run_dirs.empty()) return absl::InvalidArgumentError("no run directories to evaluate");
  struct Group {
    std::string label;
    std::string epsilon;
    std::string mode;
    std::string proximity;
    std::vector<double> scores;
  };
  std::map<std::tuple<std::string, std::string, std::string>, Group> groups;
  std::vector<std::tuple<std::string, std::string, std::string>> order;
  const std::string metric = config.task == Task::kLinkPred ? "auc" : "strucequ";

  for (const std::string& dir : run_dirs) {
    auto manifest = ReadManifest(dir);
    if (!manifest.ok()) return manifest.status();
    auto run_config = ParseRunConfig(manifest->config);
    if (!run_config.ok()) return run_config.status();
    auto digest = Sha256File(run_config->input);
    if (!digest.ok()) return digest.status();
    if (*digest != manifest->input_sha256) {
      return absl::FailedPreconditionError(
          absl::StrCat("input ", run_config->input, " changed since run ", dir, " was trained"));
    }
    const std::string w_in_path = (fs::path(dir) / manifest->w_in).string();
    auto w_in_digest = Sha256File(w_in_path);
    if (!w_in_digest.ok()) return w_in_digest.status();
    if (*w_in_digest != manifest->w_in_sha256) {
      return absl::FailedPreconditionError(
          absl::StrCat(w_in_path, " does not match the digest in its manifest"));
    }
    auto w_in = ReadEmbedding(w_in_path);
    if (!w_in.ok()) return w_in.status();

    RunConfig graph_config = *run_config;
    graph_config.task = config.task;
    if (config.task == Task::kLinkPred && run_config->task != Task::kLinkPred) {
      return absl::FailedPreconditionError(absl::StrCat(
          "run ", dir, " was trained on the full graph; link prediction needs a linkpred run"));
    }
    auto prepared = PrepareGraph(graph_config);
    if (!prepared.ok()) return prepared.status();
    if (w_in->rows() != prepared->full.num_nodes()) {
      return absl::InvalidArgumentError(absl::StrCat("embedding in ", dir, " has ", w_in->rows(),
                                                     " rows but the graph has ",
                                                     prepared->full.num_nodes(), " nodes"));
    }

    absl::StatusOr<double> score;
    if (config.task == Task::kLinkPred) {
      EmbeddingModel model{*w_in, DenseMatrix(w_in->rows(), w_in->cols())};
      score = LinkPredictionAuc(model, *prepared->split);
    } else if (prepared->full.num_nodes() > kExactStrucEquLimit) {
      score = SampledStrucEqu(prepared->full, *w_in, 1'000'000, run_config->train.seed);
    } else {
      score = StrucEqu(prepared->full, *w_in);
    }
    if (!score.ok()) return score.status();
    out << dir << ": " << metric << "=" << FormatDouble(*score) << "\n";

    const std::string proximity(ProximityKindName(run_config->proximity));
    const std::string mode(PerturbationModeName(run_config->train.mode));
    const std::string epsilon = EpsilonLabel(*run_config);
    const auto key = std::make_tuple(proximity, mode, epsilon);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      order.push_back(key);
      it->second = Group{config.run_id.empty()
                             ? absl::StrCat(proximity, "-", mode, "-eps", epsilon)
                             : config.run_id,
                         epsilon, mode, proximity, {}};
    }
    it->second.scores.push_back(*score);
  }

  std::vector<std::vector<std::string>> rows;
  for (const auto& key : order) {
    const Group& g = groups.at(key);
    double mean = 0.0;
    for (double s : g.scores) mean += s;
    mean /= static_cast<double>(g.scores.size());
    const double stddev = SampleStddev(g.scores, mean);
    rows.push_back({g.label, g.epsilon, g.mode, g.proximity, metric, FormatDouble(mean),
                    FormatDouble(stddev), absl::StrCat(g.scores.size()), Version()});
    out << g.label << ": " << metric << " mean=" << FormatDouble(mean)
        << " stddev=" << FormatDouble(stddev) << " over " << g.scores.size() << " run(s)\n";
  }
  if (auto st = AppendCsv(config.metrics, kMetricsHeader, rows); !st.ok()) return st;
  out << "appended " << rows.size() << " row(s) to " << config.metrics << "\n";
  return absl::OkStatus();
}

absl::Status CmdAccount(const AccountArgs& args, std::ostream& out) {
  if (!(args.delta > 0.0 && args.delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  auto accountant = RdpAccountant::Create(args.gamma, args.sensitivity, args.sigma,
                                          DefaultRdpOrders(), args.releases_per_epoch);
  if (!accountant.ok()) return accountant.status();
  accountant->Compose(args.epochs);
  auto dp = accountant->ToDp(args.delta);
  if (!dp.ok()) return dp.status();
  out << "epsilon,alpha\n" << FormatDouble(dp->epsilon) << "," << dp->alpha << "\n";
  out << "alpha,rdp_per_epoch,rdp_total,epsilon\n";
  const auto total = accountant->AccumulatedRdp();
  const auto& orders = accountant->orders();
  const double log_inv_delta = std::log(1.0 / args.delta);
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const double per_epoch = accountant->per_step_rdp()[i] * args.releases_per_epoch;
    out << orders[i] << "," << FormatDouble(per_epoch) << "," << FormatDouble(total[i]) << ","
        << FormatDouble(total[i] + log_inv_delta / (orders[i] - 1)) << "\n";
  }
  return absl::OkStatus();
}

absl::Status CmdSweep(const RunConfig& config, std::ostream& out) {
  std::vector<double> grid = config.eps_grid;
  for (PerturbationMode mode : config.modes) {
    // Without noise the budget is irrelevant, so one point suffices.
    const std::vector<double> eps_values =
        mode == PerturbationMode::kNoNoise ? std::vector<double>{grid.front()} : grid;
    for (double eps : eps_values) {
      std::vector<std::string> run_dirs;
      for (std::uint64_t seed : config.seeds) {
        RunConfig run = config;
        run.train.mode = mode;
        run.train.eps_target = eps;
        run.train.seed = seed;
        run.run_id.clear();
        const fs::path dir = fs::path(config.out) / ProximityKindName(config.proximity) /
                             PerturbationModeName(mode) /
                             absl::StrCat("eps", EpsilonLabel(run)) / absl::StrCat("seed", seed);
        run.out = dir.string();
        auto manifest = CmdTrain(run, out);
        if (!manifest.ok()) {
          return absl::Status(manifest.status().code(),
                              absl::StrCat(dir.string(), ": ", manifest.status().message()));
        }
        run_dirs.push_back(run.out);
      }
      if (auto st = CmdEval(config, run_dirs, out); !st.ok()) return st;
    }
  }
  return absl::OkStatus();
}

}  // namespace dpgemb::cli
