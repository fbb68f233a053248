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

#ifndef DPGEMB_RDP_ACCOUNTANT_H_
#define DPGEMB_RDP_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"

namespace dpgemb {

// Renyi divergence bound of the Gaussian mechanism at order `alpha` > 1:
// alpha * S^2 / (2 sigma^2). Returns +infinity when sigma == 0.
absl::StatusOr<double> GaussianRdp(double alpha, double sensitivity, double sigma);

// Upper bound on the RDP of the Gaussian mechanism applied to a uniformly
// subsampled (without replacement) fraction `gamma` of the data, for integer
// orders alpha >= 2 (Wang, Balle, Kasiviswanathan 2019). The series is summed
// in log space, so large orders never overflow.
absl::StatusOr<double> SubsampledGaussianRdp(double alpha, double gamma, double sensitivity,
                                             double sigma);

// Integer orders 2..64.
std::vector<int> DefaultRdpOrders();

struct DpGuarantee {
  double epsilon = 0.0;
  int alpha = 0;
};

// Tracks the composed RDP of repeated subsampled Gaussian releases.
//
// The accumulated bound at each order is steps * per_step_bound, recomputed
// from the step count, so composing in any call pattern gives identical
// results.
class RdpAccountant {
 public:
  // `releases_per_step` counts how many subsampled Gaussian releases one step
  // makes (1 matches one composition per epoch; 2 counts W_in and W_out
  // separately).
  static absl::StatusOr<RdpAccountant> Create(double gamma, double sensitivity, double sigma,
                                              std::vector<int> orders = DefaultRdpOrders(),
                                              int releases_per_step = 1);

  void Compose(std::uint64_t steps) { steps_ += steps; }

  std::uint64_t steps() const { return steps_; }
  double gamma() const { return gamma_; }
  double sensitivity() const { return sensitivity_; }
  double sigma() const { return sigma_; }
  const std::vector<int>& orders() const { return orders_; }
  const std::vector<double>& per_step_rdp() const { return per_step_; }

  // Accumulated bound at each order (same indexing as orders()).
  std::vector<double> AccumulatedRdp() const;

  // Tightest (epsilon, delta)-DP guarantee over the order grid:
  // min_alpha eps(alpha) + log(1/delta) / (alpha - 1).
  absl::StatusOr<DpGuarantee> ToDp(double delta) const;

  // Smallest delta achievable at the target epsilon over the grid:
  // min_alpha exp(-(alpha - 1) (eps_target - eps(alpha))), clamped to [0, 1].
  absl::StatusOr<double> DeltaSpent(double eps_target) const;

 private:
  double gamma_ = 1.0;
  double sensitivity_ = 1.0;
  double sigma_ = 1.0;
  std::vector<int> orders_;
  std::vector<double> per_step_;
  std::uint64_t steps_ = 0;
};

}  // namespace dpgemb

#endif  // DPGEMB_RDP_ACCOUNTANT_H_
