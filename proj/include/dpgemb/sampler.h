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

#ifndef DPGEMB_SAMPLER_H_
#define DPGEMB_SAMPLER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpgemb/graph.h"
#include "dpgemb/proximity.h"
#include "dpgemb/rng.h"

namespace dpgemb {

// One positive pair plus k negatives drawn for its center.
struct SubgraphSample {
  NodeId center = 0;
  NodeId positive = 0;
  std::vector<NodeId> negatives;

  friend bool operator==(const SubgraphSample&, const SubgraphSample&) = default;
};

enum class PositiveSet {
  // One sample per undirected edge, centered on the smaller endpoint.
  kEdges,
  // Two samples per edge, one centered on each endpoint.
  kEdgesBothDirections,
  // One sample per ordered pair (i, j) with p_ij > 0. This is the pair set
  // the weighted objective sums over; requires a proximity matrix.
  kProximitySupport,
};

struct SamplerOptions {
  std::size_t k = 5;
  std::uint64_t seed = 0;
  PositiveSet positives = PositiveSet::kEdges;
  // When true (the default), a draw is rejected if it equals the center or
  // is adjacent to it. When false, negatives are uniform over all of V.
  bool reject_neighbors = true;
  // Rejection budget per negative slot is retry_factor * k draws.
  std::size_t retry_factor = 100;
};

// Draws options.k negatives for `center`: uniform over V, and with
// options.reject_neighbors also redrawn while equal or adjacent to the center.
// Fails if the center is adjacent to every other node or a slot exhausts its
// retry budget.
absl::StatusOr<std::vector<NodeId>> DrawNegatives(const Graph& graph,
                                                  const SamplerOptions& options, NodeId center,
                                                  Rng& rng);

// Builds the fixed training set: one SubgraphSample per positive pair with
// negatives drawn by rejection. Deterministic in options.seed; sample s uses
// its own RNG stream.
absl::StatusOr<std::vector<SubgraphSample>> GenerateSubgraphs(
    const Graph& graph, const SamplerOptions& options,
    const ProximityMatrix* proximity = nullptr);

// Redraws the negatives of every sample for `epoch` from one stream per
// epoch, disjoint from the streams GenerateSubgraphs uses.
absl::Status ResampleNegatives(const Graph& graph, const SamplerOptions& options,
                               std::uint64_t epoch, std::vector<SubgraphSample>& samples);

struct BatchDraw {
  std::vector<std::size_t> indices;
  // B / number of samples; the sampling ratio handed to the accountant.
  double gamma = 0.0;
};

// B distinct indices drawn uniformly without replacement from
// [0, num_samples).
absl::StatusOr<BatchDraw> SampleBatch(std::size_t num_samples, std::size_t batch_size, Rng& rng);

// Text cache: one "center positive n_1 ... n_k" line per sample.
absl::Status WriteSubgraphCache(const std::vector<SubgraphSample>& samples,
                                const std::string& path);
absl::StatusOr<std::vector<SubgraphSample>> ReadSubgraphCache(const std::string& path);

}  // namespace dpgemb

#endif  // DPGEMB_SAMPLER_H_
