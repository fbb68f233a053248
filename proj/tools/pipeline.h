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

// Command implementations behind the dpgemb binary: configuration resolution,
// run manifests and the prep / train / eval / account / sweep pipeline.

#ifndef DPGEMB_TOOLS_PIPELINE_H_
#define DPGEMB_TOOLS_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpgemb/io.h"
#include "dpgemb/proximity.h"
#include "dpgemb/trainer.h"

namespace dpgemb::cli {

// Environment variables named kEnvPrefix + upper-cased key override the
// config file; command-line flags override both.
inline constexpr char kEnvPrefix[] = "DPGEMB_";

// Manifest keys that describe a finished run rather than its configuration
// start with this prefix; configuration parsing skips them.
inline constexpr char kRunKeyPrefix[] = "run.";

inline constexpr char kManifestFile[] = "manifest.txt";

enum class Task { kStrucEqu, kLinkPred };

struct RunConfig {
  // Graph input.
  std::string input;
  bool relabel = false;
  std::optional<std::size_t> num_nodes;

  ProximityKind proximity = ProximityKind::kDeepWalk;
  std::size_t window = kDefaultDeepWalkWindow;

  // Training hyperparameters. train.max_epochs follows the task default
  // unless `epochs` is set explicitly.
  TrainConfig train;
  bool epochs_set = false;

  Task task = Task::kStrucEqu;
  double test_fraction = 0.1;
  std::uint64_t split_seed = 1;

  std::string out = "run";
  std::string metrics = "metrics.csv";
  EmbeddingFormat format = EmbeddingFormat::kText;
  std::string run_id;
  std::string proximity_cache;
  std::string subgraph_cache;

  // Seed list for eval aggregation and sweeps.
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> eps_grid = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  std::vector<PerturbationMode> modes = {PerturbationMode::kNaive, PerturbationMode::kNonZero};
};

inline constexpr std::size_t kStrucEquEpochs = 200;
inline constexpr std::size_t kLinkPredEpochs = 2000;

// Every recognised configuration key, in canonical order.
const std::vector<std::string>& ConfigKeys();

// Merges defaults < file < environment < flags. `config_path` may be empty.
// `getenv` is injectable for tests.
absl::StatusOr<KeyValues> ResolveConfig(const std::string& config_path, const KeyValues& flags,
                                        const char* (*getenv)(const char*) = nullptr);

// Parses and validates a resolved key-value map. Unknown keys are errors;
// keys under kRunKeyPrefix are ignored so a manifest can serve as a config.
absl::StatusOr<RunConfig> ParseRunConfig(const KeyValues& values);

// Canonical snapshot of every configuration key.
KeyValues ConfigSnapshot(const RunConfig& config);

std::string_view TaskName(Task task);

// Provenance record written next to every trained embedding.
struct RunManifest {
  KeyValues config;
  std::string version;
  std::string run_id;
  std::uint64_t seed = 0;
  std::string input_sha256;
  std::string proximity_cache_sha256;
  std::string subgraph_cache_sha256;
  // Output file names relative to the run directory, with digests.
  std::string w_in;
  std::string w_out;
  std::string loss_trace;
  std::string w_in_sha256;
  std::string w_out_sha256;
  RunReport report;
  double delta = 0.0;

  KeyValues ToKeyValues() const;
  static absl::StatusOr<RunManifest> FromKeyValues(const KeyValues& values);
};

absl::StatusOr<RunManifest> ReadManifest(const std::string& run_dir);

// Build version: git describe output when available, else the project
// version.
std::string Version();

// Computes the proximity matrix and subgraph caches into config.out and prints
// min(P), the sampling ratio and the negative-weight range.
absl::Status CmdPrep(const RunConfig& config, std::ostream& out);

// Trains one model into config.out: embeddings, loss trace and manifest.
absl::StatusOr<RunManifest> CmdTrain(const RunConfig& config, std::ostream& out);

// Evaluates trained runs and appends one aggregated CSV row per
// (proximity, mode, epsilon) group to config.metrics.
absl::Status CmdEval(const RunConfig& config, const std::vector<std::string>& run_dirs,
                     std::ostream& out);

struct AccountArgs {
  double sigma = 5.0;
  double sensitivity = 2.0;
  double gamma = 0.01;
  std::uint64_t epochs = 200;
  double delta = 1e-5;
  int releases_per_epoch = 1;
};

// Prints the (epsilon, alpha*) pair and the per-order table as CSV.
absl::Status CmdAccount(const AccountArgs& args, std::ostream& out);

// Trains every (epsilon, mode, seed) combination under config.out and
// evaluates each (epsilon, mode) group.
absl::Status CmdSweep(const RunConfig& config, std::ostream& out);

}  // namespace dpgemb::cli

#endif  // DPGEMB_TOOLS_PIPELINE_H_
