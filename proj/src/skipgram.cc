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

#include "dpgemb/skipgram.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpgemb {
namespace {

bool RowFinite(std::span<const double> row) {
  return std::all_of(row.begin(), row.end(), [](double v) { return std::isfinite(v); });
}

absl::Status CheckSample(const SubgraphSample& sample, const EmbeddingModel& model) {
  const std::size_t n = model.num_nodes();
  auto check = [&](NodeId v, const DenseMatrix& table, const char* name) -> absl::Status {
    if (v >= n) return absl::OutOfRangeError(absl::StrCat("node ", v, " out of range"));
    if (!RowFinite(table.row(v))) {
      return absl::DataLossError(absl::StrCat("non-finite ", name, " row for node ", v));
    }
    return absl::OkStatus();
  };
  if (auto st = check(sample.center, model.w_in, "w_in"); !st.ok()) return st;
  if (auto st = check(sample.positive, model.w_out, "w_out"); !st.ok()) return st;
  for (NodeId neg : sample.negatives) {
    if (auto st = check(neg, model.w_out, "w_out"); !st.ok()) return st;
  }
  return absl::OkStatus();
}

}  // namespace

bool EmbeddingModel::AllFinite() const {
  return RowFinite(w_in.data()) && RowFinite(w_out.data());
}

absl::StatusOr<double> SkipGramLoss(const SubgraphSample& sample, const EmbeddingModel& model,
                                    double proximity, double negative_weight) {
  if (auto st = CheckSample(sample, model); !st.ok()) return st;
  const auto vi = model.w_in.row(sample.center);
  double negative_sum = 0.0;
  for (NodeId neg : sample.negatives) negative_sum += LogSigmoid(-Dot(model.w_out.row(neg), vi));
  return -proximity *
         (LogSigmoid(Dot(model.w_out.row(sample.positive), vi)) + negative_weight * negative_sum);
}

absl::StatusOr<std::vector<double>> GradCenter(const SubgraphSample& sample,
                                               const EmbeddingModel& model, double proximity,
                                               double negative_weight) {
  if (auto st = CheckSample(sample, model); !st.ok()) return st;
  return ComputeSampleGradient(sample, model, proximity, negative_weight).center_grad;
}

absl::StatusOr<std::vector<double>> GradContext(const SubgraphSample& sample,
                                                const EmbeddingModel& model, double proximity,
                                                double negative_weight, std::size_t slot) {
  if (auto st = CheckSample(sample, model); !st.ok()) return st;
  if (slot > sample.negatives.size()) {
    return absl::OutOfRangeError(absl::StrCat("context slot ", slot, " exceeds k = ",
                                              sample.negatives.size()));
  }
  const auto vi = model.w_in.row(sample.center);
  const NodeId node = slot == 0 ? sample.positive : sample.negatives[slot - 1];
  const double indicator = slot == 0 ? 1.0 : 0.0;
  const double weight = slot == 0 ? 1.0 : negative_weight;
  const double coeff =
      proximity * weight * (Sigmoid(Dot(model.w_out.row(node), vi)) - indicator);
  std::vector<double> grad(vi.begin(), vi.end());
  for (double& g : grad) g *= coeff;
  return grad;
}

SampleGradient ComputeSampleGradient(const SubgraphSample& sample, const EmbeddingModel& model,
                                     double proximity, double negative_weight) {
  const std::size_t r = model.dim();
  const auto vi = model.w_in.row(sample.center);
  SampleGradient out;
  out.center = sample.center;
  out.center_grad.assign(r, 0.0);
  out.context_grads.reserve(sample.negatives.size() + 1);

  auto add_slot = [&](NodeId node, double indicator, double weight) {
    const auto vn = model.w_out.row(node);
    const double coeff = proximity * weight * (Sigmoid(Dot(vn, vi)) - indicator);
    for (std::size_t c = 0; c < r; ++c) out.center_grad[c] += coeff * vn[c];
    auto it = std::find_if(out.context_grads.begin(), out.context_grads.end(),
                           [node](const auto& entry) { return entry.first == node; });
    if (it == out.context_grads.end()) {
      out.context_grads.emplace_back(node, std::vector<double>(r, 0.0));
      it = out.context_grads.end() - 1;
    }
    for (std::size_t c = 0; c < r; ++c) it->second[c] += coeff * vi[c];
  };

  add_slot(sample.positive, 1.0, 1.0);
  for (NodeId neg : sample.negatives) add_slot(neg, 0.0, negative_weight);
  return out;
}

double L2Norm(std::span<const double> v) { return std::sqrt(Dot(v, v)); }

void ClipInPlace(std::span<double> gradient, double threshold) {
  const double scale = std::max(1.0, L2Norm(gradient) / threshold);
  if (scale > 1.0) {
    for (double& g : gradient) g /= scale;
  }
}

std::vector<double> Clip(std::span<const double> gradient, double threshold) {
  std::vector<double> out(gradient.begin(), gradient.end());
  ClipInPlace(out, threshold);
  return out;
}

}  // namespace dpgemb
