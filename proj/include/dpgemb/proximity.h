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

#ifndef DPGEMB_PROXIMITY_H_
#define DPGEMB_PROXIMITY_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpgemb/dense_matrix.h"
#include "dpgemb/graph.h"

namespace dpgemb {

enum class ProximityKind { kDegree, kDeepWalk };

std::string_view ProximityKindName(ProximityKind kind);
absl::StatusOr<ProximityKind> ParseProximityKind(std::string_view name);

inline constexpr std::size_t kDefaultDeepWalkWindow = 10;

// Dense |V| x |V| node proximity matrix with cached row sums and the
// smallest strictly positive entry. The diagonal is always zero.
class ProximityMatrix {
 public:
  // Takes ownership of `values`, zeroes the diagonal, and derives row sums
  // and the minimum positive entry from what is stored. Fails on negative or
  // non-finite entries and on an all-zero matrix.
  static absl::StatusOr<ProximityMatrix> FromValues(DenseMatrix values, ProximityKind kind,
                                                    std::size_t window = 0);

  std::size_t num_nodes() const { return values_.rows(); }
  ProximityKind kind() const { return kind_; }
  // Random-walk window for kDeepWalk, 0 otherwise.
  std::size_t window() const { return window_; }

  double operator()(NodeId i, NodeId j) const { return values_(i, j); }
  const DenseMatrix& values() const { return values_; }
  double row_sum(NodeId i) const { return row_sums_[i]; }
  const std::vector<double>& row_sums() const { return row_sums_; }
  double min_positive() const { return min_positive_; }

  // Returns a copy with every entry multiplied by `factor` > 0.
  ProximityMatrix Scaled(double factor) const;

 private:
  DenseMatrix values_;
  std::vector<double> row_sums_;
  double min_positive_ = 0.0;
  ProximityKind kind_ = ProximityKind::kDegree;
  std::size_t window_ = 0;
};

// Preferential attachment: p_ij = d_i * d_j off the diagonal.
absl::StatusOr<ProximityMatrix> DegreeProximity(const Graph& graph);

// Random-walk proximity (1/T) * sum_{t=1..T} (D^-1 A)^t, diagonal zeroed.
// Isolated nodes get all-zero rows.
absl::StatusOr<ProximityMatrix> DeepWalkProximity(const Graph& graph,
                                                  std::size_t window = kDefaultDeepWalkWindow);

// Scale applied to uniformly drawn negatives so that their Monte-Carlo mean
// equals sum_n [min(P) / rowsum_i] f(n):  w_i = |V| * min(P) / rowsum_i.
absl::StatusOr<double> NegativeWeight(const ProximityMatrix& proximity, NodeId center);

// Per-node negative weights; nodes with zero row sum get 0.
std::vector<double> NegativeWeights(const ProximityMatrix& proximity);

// Nodes whose sampling mass min(P) / rowsum_i falls outside the open
// interval (0, 1), i.e. zero rows and rows holding a single positive entry
// equal to min(P).
std::vector<NodeId> SamplingMassViolations(const ProximityMatrix& proximity);

// Binary cache: magic, |V|, kind, window, then row-major doubles.
absl::Status WriteProximityCache(const ProximityMatrix& proximity, const std::string& path);
absl::StatusOr<ProximityMatrix> ReadProximityCache(const std::string& path);

}  // namespace dpgemb

#endif  // DPGEMB_PROXIMITY_H_
