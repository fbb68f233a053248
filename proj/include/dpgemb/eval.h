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

#ifndef DPGEMB_EVAL_H_
#define DPGEMB_EVAL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dpgemb/dense_matrix.h"
#include "dpgemb/graph.h"
#include "dpgemb/proximity.h"
#include "dpgemb/skipgram.h"

namespace dpgemb {

// Pearson correlation between adjacency-row and embedding-row Euclidean
// distances over all unordered node pairs. Fails when either distance series
// has zero variance.
absl::StatusOr<double> StrucEqu(const Graph& graph, const DenseMatrix& embedding);

// Same statistic over `num_pairs` uniformly drawn pairs i != j, for graphs
// too large for the exact all-pairs pass.
absl::StatusOr<double> SampledStrucEqu(const Graph& graph, const DenseMatrix& embedding,
                                       std::size_t num_pairs, std::uint64_t seed);

// Node count above which callers should prefer SampledStrucEqu.
inline constexpr std::size_t kExactStrucEquLimit = 5000;

// Pearson correlation of two equally long series (two-pass).
absl::StatusOr<double> Pearson(std::span<const double> x, std::span<const double> y);

struct LinkSplit {
  Graph train_graph;
  std::vector<Edge> test_pos;
  std::vector<Edge> test_neg;
  std::vector<Edge> train_neg;
};

// Holds out round(test_fraction * |E|) edges (at least one) uniformly at
// random and draws matching non-edges of the original graph for the test set
// and |train edges| further non-edges for training.
absl::StatusOr<LinkSplit> SplitLinks(const Graph& graph, double test_fraction,
                                     std::uint64_t seed);

// Mann-Whitney AUC: P(score_pos > score_neg) + 0.5 P(tie).
absl::StatusOr<double> AucFromScores(std::span<const double> positive_scores,
                                     std::span<const double> negative_scores);

// Link prediction AUC on the held-out pairs, scoring (i, j) by
// sigmoid(v_i . v_j) with both vectors taken from w_in.
absl::StatusOr<double> LinkPredictionAuc(const EmbeddingModel& model, const LinkSplit& split);

// Edges whose inner product is checked against the closed-form optimum.
enum class ResidualPairs {
  // (i, j) with i < j, matching the default one-sample-per-edge training.
  kCanonicalEdges,
  // Both (i, j) and (j, i) for every edge.
  kBothOrientations,
};

struct FixedPointResidual {
  std::size_t pairs = 0;
  // |x_ij - log(p_ij / (k min(P)))| with x_ij = w_in[i] . w_out[j].
  double mean_abs = 0.0;
  double max_abs = 0.0;
  // Same against the degree-based negative sampling optimum
  // log(p_ij D / (d_i d_j)) - log k, D = sum_ij p_ij.
  double prior_mean_abs = 0.0;
  double prior_max_abs = 0.0;
};

// Target inner product log(p / (k min_p)) of the weighted objective.
double FixedPointTarget(double p, double min_p, std::size_t k);

absl::StatusOr<FixedPointResidual> ComputeFixedPointResidual(
    const EmbeddingModel& model, const Graph& graph, const ProximityMatrix& proximity,
    std::size_t k, ResidualPairs pairs = ResidualPairs::kCanonicalEdges);

}  // namespace dpgemb

#endif  // DPGEMB_EVAL_H_
