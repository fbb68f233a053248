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

#ifndef DPGEMB_SKIPGRAM_H_
#define DPGEMB_SKIPGRAM_H_

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "dpgemb/dense_matrix.h"
#include "dpgemb/sampler.h"

namespace dpgemb {

// Center (input) and context (output) embedding tables, both |V| x r.
struct EmbeddingModel {
  DenseMatrix w_in;
  DenseMatrix w_out;

  std::size_t num_nodes() const { return w_in.rows(); }
  std::size_t dim() const { return w_in.cols(); }
  bool AllFinite() const;

  friend bool operator==(const EmbeddingModel&, const EmbeddingModel&) = default;
};

inline double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow or cancellation for large |x|.
inline double LogSigmoid(double x) {
  if (x >= 0.0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Proximity-weighted negative-sampling loss of one sample:
//   -p [ log s(v_j . v_i) + w * sum_n log s(-v_n . v_i) ]
// with v_i a row of w_in and v_j, v_n rows of w_out.
absl::StatusOr<double> SkipGramLoss(const SubgraphSample& sample, const EmbeddingModel& model,
                                    double proximity, double negative_weight);

// d loss / d v_i.
absl::StatusOr<std::vector<double>> GradCenter(const SubgraphSample& sample,
                                               const EmbeddingModel& model, double proximity,
                                               double negative_weight);

// Gradient contributed through one context slot: slot 0 is the positive,
// slot n in [1, k] is negatives[n - 1]. When a node fills several slots, the
// derivative with respect to its row is the sum over those slots.
absl::StatusOr<std::vector<double>> GradContext(const SubgraphSample& sample,
                                                const EmbeddingModel& model, double proximity,
                                                double negative_weight, std::size_t slot);

// All nonzero-row gradients of one sample. Context slots that share a node
// are merged into one row gradient, in order of first appearance.
struct SampleGradient {
  NodeId center = 0;
  std::vector<double> center_grad;
  std::vector<std::pair<NodeId, std::vector<double>>> context_grads;
};

// Unchecked fast path used by the trainer.
SampleGradient ComputeSampleGradient(const SubgraphSample& sample, const EmbeddingModel& model,
                                     double proximity, double negative_weight);

// g / max(1, ||g||_2 / C).
std::vector<double> Clip(std::span<const double> gradient, double threshold);
void ClipInPlace(std::span<double> gradient, double threshold);

double L2Norm(std::span<const double> v);

}  // namespace dpgemb

#endif  // DPGEMB_SKIPGRAM_H_
