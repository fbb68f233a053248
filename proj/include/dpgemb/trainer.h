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

#ifndef DPGEMB_TRAINER_H_
#define DPGEMB_TRAINER_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpgemb/graph.h"
#include "dpgemb/proximity.h"
#include "dpgemb/rng.h"
#include "dpgemb/sampler.h"
#include "dpgemb/skipgram.h"

namespace dpgemb {

enum class PerturbationMode {
  // Clipped SGD, no noise and no privacy accounting.
  kNoNoise,
  // Gaussian noise on every row of both gradient accumulators.
  kNaive,
  // Gaussian noise only on rows the batch actually touched.
  kNonZero,
};

enum class NegativeWeighting {
  // Negatives scaled by w_i = |V| min(P) / rowsum_i.
  kTheoretical,
  // Plain skip-gram: every negative has weight 1.
  kUniform,
};

std::string_view PerturbationModeName(PerturbationMode mode);
absl::StatusOr<PerturbationMode> ParsePerturbationMode(std::string_view name);
std::string_view NegativeWeightingName(NegativeWeighting weighting);
absl::StatusOr<NegativeWeighting> ParseNegativeWeighting(std::string_view name);
std::string_view PositiveSetName(PositiveSet positives);
absl::StatusOr<PositiveSet> ParsePositiveSet(std::string_view name);

struct TrainConfig {
  double eta = 0.1;
  std::size_t batch_size = 128;
  double clip = 2.0;
  double sigma = 5.0;
  std::size_t k = 5;
  std::size_t dim = 128;
  std::size_t max_epochs = 200;
  double eps_target = 3.5;
  double delta = 1e-5;
  // Gradient sensitivity S; the clip threshold when unset.
  std::optional<double> sensitivity;
  PerturbationMode mode = PerturbationMode::kNonZero;
  NegativeWeighting neg_weighting = NegativeWeighting::kTheoretical;
  std::uint64_t seed = 1;

  PositiveSet positives = PositiveSet::kEdges;
  bool reject_neighbors = true;
  // Draw fresh negatives every epoch instead of once before training. The
  // privacy analysis assumes the fixed pre-training draw.
  bool resample_negatives = false;
  // Subsampled Gaussian releases composed per epoch (2 counts W_in and W_out
  // separately).
  int releases_per_epoch = 1;

  double Sensitivity() const { return sensitivity.value_or(clip); }
  SamplerOptions Sampler() const;
  absl::Status Validate() const;
};

// Rows that received a nonzero clipped gradient in one batch, sorted.
struct TouchedRows {
  std::vector<NodeId> in_rows;
  std::vector<NodeId> out_rows;
};

// Uniform [-0.5/r, 0.5/r] for w_in, zeros for w_out.
EmbeddingModel InitModel(std::size_t num_nodes, std::size_t dim, std::uint64_t seed);

// One noisy SGD step over `batch` (indices into `samples`). Per-sample,
// per-row gradients are clipped to config.clip and summed; noise with
// standard deviation S * sigma is added per config.mode; the sum is divided
// by the batch size and applied with step config.eta. On a non-finite result
// the model is left untouched and an error is returned.
absl::StatusOr<TouchedRows> BatchUpdate(EmbeddingModel& model,
                                        const std::vector<SubgraphSample>& samples,
                                        std::span<const std::size_t> batch,
                                        const ProximityMatrix& proximity,
                                        std::span<const double> negative_weights,
                                        const TrainConfig& config, Rng& noise_rng);

// Per-center negative weights for the configured weighting scheme.
std::vector<double> NegativeWeightsFor(const ProximityMatrix& proximity,
                                       NegativeWeighting weighting);

struct RunReport {
  std::size_t epochs_completed = 0;
  bool stopped_by_budget = false;
  double gamma = 0.0;
  double sensitivity = 0.0;
  double sigma = 0.0;
  // (epsilon, delta) spent; epsilon is +inf for kNoNoise runs.
  double epsilon = 0.0;
  int alpha = 0;
  double delta_hat = 1.0;
  // Mean batch loss per epoch, measured before the update.
  std::vector<double> loss_trace;
};

struct TrainResult {
  EmbeddingModel model;
  RunReport report;
};

// Runs up to config.max_epochs epochs. Private modes compose the subsampled
// Gaussian bound after every epoch and stop once the delta spent at
// config.eps_target reaches config.delta; that epoch's update is kept.
absl::StatusOr<TrainResult> Train(const Graph& graph, const ProximityMatrix& proximity,
                                  std::vector<SubgraphSample> samples,
                                  const TrainConfig& config);

// Generates the subgraph set from config and trains.
absl::StatusOr<TrainResult> Train(const Graph& graph, const ProximityMatrix& proximity,
                                  const TrainConfig& config);

}  // namespace dpgemb

#endif  // DPGEMB_TRAINER_H_
