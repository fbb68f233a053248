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

#include "dpgemb/rdp_accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpgemb {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

absl::StatusOr<double> GaussianRdp(double alpha, double sensitivity, double sigma) {
  if (!(alpha > 1.0)) return absl::InvalidArgumentError("RDP order must exceed 1");
  if (sigma < 0.0 || sensitivity < 0.0) {
    return absl::InvalidArgumentError("sigma and sensitivity must be nonnegative");
  }
  if (sigma == 0.0) return kInf;
  return alpha * sensitivity * sensitivity / (2.0 * sigma * sigma);
}

absl::StatusOr<double> SubsampledGaussianRdp(double alpha, double gamma, double sensitivity,
                                             double sigma) {
  if (alpha < 2.0 || alpha != std::floor(alpha) || alpha > 1e6) {
    return absl::InvalidArgumentError(
        absl::StrCat("subsampled RDP needs an integer order >= 2, got ", alpha));
  }
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("sampling ratio ", gamma,
                                                   " outside (0, 1]"));
  }
  if (sigma < 0.0 || sensitivity < 0.0) {
    return absl::InvalidArgumentError("sigma and sensitivity must be nonnegative");
  }
  if (sigma == 0.0) return kInf;

  const int a = static_cast<int>(alpha);
  const double unit = sensitivity * sensitivity / (2.0 * sigma * sigma);  // eps(j) = j * unit
  const double log_gamma = std::log(gamma);

  // The Gaussian's eps(inf) is unbounded, so min{2, (e^eps(inf) - 1)^j} = 2.
  std::vector<double> log_terms;
  log_terms.reserve(a);
  {
    const double eps2 = 2.0 * unit;
    const double log_min = std::min(std::log(4.0) + std::log(std::expm1(eps2)),
                                    std::log(2.0) + eps2);
    log_terms.push_back(2.0 * log_gamma + LogBinomial(a, 2) + log_min);
  }
  for (int j = 3; j <= a; ++j) {
    log_terms.push_back(j * log_gamma + LogBinomial(a, j) + (j - 1) * (j * unit) +
                        std::log(2.0));
  }

  // log(1 + sum exp(t)).
  const double top = *std::max_element(log_terms.begin(), log_terms.end());
  double log_sum;
  if (top <= 0.0) {
    double s = 0.0;
    for (double t : log_terms) s += std::exp(t);
    log_sum = std::log1p(s);
  } else {
    double s = std::exp(-top);
    for (double t : log_terms) s += std::exp(t - top);
    log_sum = top + std::log(s);
  }
  return log_sum / (alpha - 1.0);
}

std::vector<int> DefaultRdpOrders() {
  std::vector<int> orders;
  for (int a = 2; a <= 64; ++a) orders.push_back(a);
  return orders;
}

absl::StatusOr<RdpAccountant> RdpAccountant::Create(double gamma, double sensitivity,
                                                    double sigma, std::vector<int> orders,
                                                    int releases_per_step) {
  if (orders.empty()) return absl::InvalidArgumentError("RDP order grid is empty");
  if (releases_per_step < 1) {
    return absl::InvalidArgumentError("releases_per_step must be >= 1");
  }
  RdpAccountant acct;
  acct.gamma_ = gamma;
  acct.sensitivity_ = sensitivity;
  acct.sigma_ = sigma;
  acct.per_step_.reserve(orders.size());
  for (int a : orders) {
    auto eps = SubsampledGaussianRdp(a, gamma, sensitivity, sigma);
    if (!eps.ok()) return eps.status();
    acct.per_step_.push_back(releases_per_step * *eps);
  }
  acct.orders_ = std::move(orders);
  return acct;
}

std::vector<double> RdpAccountant::AccumulatedRdp() const {
  std::vector<double> out(per_step_.size());
  const double steps = static_cast<double>(steps_);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = steps_ == 0 ? 0.0 : steps * per_step_[i];
  }
  return out;
}

absl::StatusOr<DpGuarantee> RdpAccountant::ToDp(double delta) const {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat("delta ", delta, " outside (0, 1)"));
  }
  const auto acc = AccumulatedRdp();
  DpGuarantee best{kInf, orders_.front()};
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const double eps = acc[i] + std::log(1.0 / delta) / (orders_[i] - 1.0);
    if (eps < best.epsilon) best = {eps, orders_[i]};
  }
  return best;
}

absl::StatusOr<double> RdpAccountant::DeltaSpent(double eps_target) const {
  if (!(eps_target > 0.0)) {
    return absl::InvalidArgumentError("target epsilon must be positive");
  }
  const auto acc = AccumulatedRdp();
  double best = 1.0;
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    if (acc[i] >= eps_target) continue;  // exponent >= 0: delta-hat of 1
    best = std::min(best, std::exp(-(orders_[i] - 1.0) * (eps_target - acc[i])));
  }
  return std::clamp(best, 0.0, 1.0);
}

}  // namespace dpgemb
