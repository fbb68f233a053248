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

#include "dpgemb/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/str_cat.h"
#include "dpgemb/rdp_accountant.h"

namespace dpgemb {

std::string_view PerturbationModeName(PerturbationMode mode) {
  switch (mode) {
    case PerturbationMode::kNoNoise:
      return "nonoise";
    case PerturbationMode::kNaive:
      return "naive";
    case PerturbationMode::kNonZero:
      return "nonzero";
  }
  return "unknown";
}

absl::StatusOr<PerturbationMode> ParsePerturbationMode(std::string_view name) {
  if (name == "nonoise") return PerturbationMode::kNoNoise;
  if (name == "naive") return PerturbationMode::kNaive;
  if (name == "nonzero") return PerturbationMode::kNonZero;
  return absl::InvalidArgumentError(absl::StrCat("unknown perturbation mode '", std::string(name), "'"));
}

std::string_view NegativeWeightingName(NegativeWeighting weighting) {
  return weighting == NegativeWeighting::kTheoretical ? "theoretical" : "uniform";
}

absl::StatusOr<NegativeWeighting> ParseNegativeWeighting(std::string_view name) {
  if (name == "theoretical") return NegativeWeighting::kTheoretical;
  if (name == "uniform") return NegativeWeighting::kUniform;
  return absl::InvalidArgumentError(absl::StrCat("unknown negative weighting '", std::string(name), "'"));
}

std::string_view PositiveSetName(PositiveSet positives) {
  switch (positives) {
    case PositiveSet::kEdges:
      return "edges";
    case PositiveSet::kEdgesBothDirections:
      return "edges-both";
    case PositiveSet::kProximitySupport:
      return "support";
  }
  return "unknown";
}

absl::StatusOr<PositiveSet> ParsePositiveSet(std::string_view name) {
  if (name == "edges") return PositiveSet::kEdges;
  if (name == "edges-both") return PositiveSet::kEdgesBothDirections;
  if (name == "support") return PositiveSet::kProximitySupport;
  return absl::InvalidArgumentError(absl::StrCat("unknown positive set '", std::string(name), "'"));
}

SamplerOptions TrainConfig::Sampler() const {
  SamplerOptions options;
  options.k = k;
  options.seed = seed;
  options.positives = positives;
  options.reject_neighbors = reject_neighbors;
  return options;
}

absl::Status TrainConfig::Validate() const {
  if (!(eta > 0.0)) return absl::InvalidArgumentError("eta must be positive");
  if (!(clip > 0.0)) return absl::InvalidArgumentError("clip threshold C must be positive");
  if (!(sigma >= 0.0)) return absl::InvalidArgumentError("sigma must be nonnegative");
  if (batch_size == 0) return absl::InvalidArgumentError("batch size B must be >= 1");
  if (k == 0) return absl::InvalidArgumentError("k must be >= 1");
  if (dim == 0) return absl::InvalidArgumentError("embedding dimension r must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) return absl::InvalidArgumentError("delta must lie in (0, 1)");
  if (!(Sensitivity() >= 0.0)) return absl::InvalidArgumentError("sensitivity must be >= 0");
  if (releases_per_epoch < 1) return absl::InvalidArgumentError("releases_per_epoch must be >= 1");
  if (mode != PerturbationMode::kNoNoise) {
    if (!(sigma > 0.0)) return absl::InvalidArgumentError("private modes need sigma > 0");
    if (!(eps_target > 0.0)) {
      return absl::InvalidArgumentError("target epsilon must be positive; no budget to spend");
    }
  }
  return absl::OkStatus();
}

EmbeddingModel InitModel(std::size_t num_nodes, std::size_t dim, std::uint64_t seed) {
  EmbeddingModel model{DenseMatrix(num_nodes, dim), DenseMatrix(num_nodes, dim)};
  Rng rng = MakeRng(seed, RngStream::kInit);
  const double half_width = 0.5 / static_cast<double>(dim);
  std::uniform_real_distribution<double> uniform(-half_width, half_width);
  for (double& v : model.w_in.data()) v = uniform(rng);
  return model;
}

std::vector<double> NegativeWeightsFor(const ProximityMatrix& proximity,
                                       NegativeWeighting weighting) {
  if (weighting == NegativeWeighting::kTheoretical) return NegativeWeights(proximity);
  return std::vector<double>(proximity.num_nodes(), 1.0);
}

namespace {

// Sparse per-row accumulator; rows are kept in first-touch order so the
// reduction is deterministic.
class RowAccumulator {
 public:
  explicit RowAccumulator(std::size_t dim) : dim_(dim) {}

  void Add(NodeId row, std::span<const double> grad) {
    auto [it, inserted] = slot_.try_emplace(row, rows_.size());
    if (inserted) {
      rows_.push_back(row);
      values_.resize(values_.size() + dim_, 0.0);
    }
    double* dst = values_.data() + it->second * dim_;
    for (std::size_t c = 0; c < dim_; ++c) dst[c] += grad[c];
  }

  // Accumulated gradient of `row`, or nullptr if untouched.
  const double* Find(NodeId row) const {
    auto it = slot_.find(row);
    return it == slot_.end() ? nullptr : values_.data() + it->second * dim_;
  }

  std::vector<NodeId> SortedRows() const {
    std::vector<NodeId> rows = rows_;
    std::sort(rows.begin(), rows.end());
    return rows;
  }

 private:
  std::size_t dim_;
  absl::flat_hash_map<NodeId, std::size_t> slot_;
  std::vector<NodeId> rows_;
  std::vector<double> values_;
};

// Computes the new value of every row in `rows` into `staged` (row-major in
// the order of `rows`). Noise is drawn row by row in that order.
bool StageRows(const DenseMatrix& table, std::span<const NodeId> rows,
               const RowAccumulator& acc, bool add_noise, double noise_std, double step,
               Rng& rng, std::vector<double>& staged) {
  const std::size_t r = table.cols();
  std::normal_distribution<double> noise(0.0, noise_std);
  staged.resize(rows.size() * r);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto current = table.row(rows[k]);
    const double* grad = acc.Find(rows[k]);
    double* out = staged.data() + k * r;
    for (std::size_t c = 0; c < r; ++c) {
      double g = grad != nullptr ? grad[c] : 0.0;
      if (add_noise) g += noise(rng);
      out[c] = current[c] - step * g;
      if (!std::isfinite(out[c])) return false;
    }
  }
  return true;
}

void CommitRows(DenseMatrix& table, std::span<const NodeId> rows,
                const std::vector<double>& staged) {
  const std::size_t r = table.cols();
  for (std::size_t k = 0; k < rows.size(); ++k) {
    std::copy_n(staged.data() + k * r, r, table.row(rows[k]).begin());
  }
}

}  // namespace

absl::StatusOr<TouchedRows> BatchUpdate(EmbeddingModel& model,
                                        const std::vector<SubgraphSample>& samples,
                                        std::span<const std::size_t> batch,
                                        const ProximityMatrix& proximity,
                                        std::span<const double> negative_weights,
                                        const TrainConfig& config, Rng& noise_rng) {
  if (batch.empty()) return absl::InvalidArgumentError("empty batch");
  const std::size_t r = model.dim();
  RowAccumulator in_acc(r), out_acc(r);
  for (std::size_t index : batch) {
    const SubgraphSample& s = samples[index];
    SampleGradient grad = ComputeSampleGradient(s, model, proximity(s.center, s.positive),
                                                negative_weights[s.center]);
    ClipInPlace(grad.center_grad, config.clip);
    in_acc.Add(grad.center, grad.center_grad);
    for (auto& [node, g] : grad.context_grads) {
      ClipInPlace(g, config.clip);
      out_acc.Add(node, g);
    }
  }

  TouchedRows touched{in_acc.SortedRows(), out_acc.SortedRows()};
  const bool noisy = config.mode != PerturbationMode::kNoNoise;
  const double noise_std = config.Sensitivity() * config.sigma;
  const double step = config.eta / static_cast<double>(batch.size());

  std::vector<NodeId> all_rows;
  if (config.mode == PerturbationMode::kNaive) {
    all_rows.resize(model.num_nodes());
    for (std::size_t v = 0; v < all_rows.size(); ++v) all_rows[v] = static_cast<NodeId>(v);
  }
  std::span<const NodeId> in_rows =
      config.mode == PerturbationMode::kNaive ? std::span<const NodeId>(all_rows)
                                              : std::span<const NodeId>(touched.in_rows);
  std::span<const NodeId> out_rows =
      config.mode == PerturbationMode::kNaive ? std::span<const NodeId>(all_rows)
                                              : std::span<const NodeId>(touched.out_rows);

  std::vector<double> staged_in, staged_out;
  if (!StageRows(model.w_in, in_rows, in_acc, noisy, noise_std, step, noise_rng, staged_in) ||
      !StageRows(model.w_out, out_rows, out_acc, noisy, noise_std, step, noise_rng,
                 staged_out)) {
    return absl::InternalError("non-finite embedding after update; aborting epoch");
  }
  CommitRows(model.w_in, in_rows, staged_in);
  CommitRows(model.w_out, out_rows, staged_out);
  return touched;
}

absl::StatusOr<TrainResult> Train(const Graph& graph, const ProximityMatrix& proximity,
                                  std::vector<SubgraphSample> samples,
                                  const TrainConfig& config) {
  if (auto st = config.Validate(); !st.ok()) return st;
  if (proximity.num_nodes() != graph.num_nodes()) {
    return absl::InvalidArgumentError("proximity matrix does not match the graph");
  }
  if (samples.empty()) return absl::InvalidArgumentError("no training samples");
  if (config.batch_size > samples.size()) {
    return absl::InvalidArgumentError(absl::StrCat("batch size ", config.batch_size,
                                                   " exceeds the ", samples.size(),
                                                   " available subgraphs"));
  }
  for (const auto& s : samples) {
    if (s.center >= graph.num_nodes() || s.positive >= graph.num_nodes()) {
      return absl::OutOfRangeError("sample references a node outside the graph");
    }
    if (s.negatives.size() != config.k) {
      return absl::InvalidArgumentError(absl::StrCat("sample carries ", s.negatives.size(),
                                                     " negatives, config expects k = ",
                                                     config.k));
    }
    if (!(proximity(s.center, s.positive) > 0.0)) {
      return absl::FailedPreconditionError(absl::StrCat(
          "pair (", s.center, ", ", s.positive, ") has zero proximity; loss is undefined"));
    }
  }

  TrainResult result;
  RunReport& report = result.report;
  report.gamma = static_cast<double>(config.batch_size) / static_cast<double>(samples.size());
  report.sensitivity = config.Sensitivity();
  report.sigma = config.sigma;

  const bool is_private = config.mode != PerturbationMode::kNoNoise;
  std::optional<RdpAccountant> accountant;
  if (is_private) {
    auto acct = RdpAccountant::Create(report.gamma, report.sensitivity, config.sigma,
                                      DefaultRdpOrders(), config.releases_per_epoch);
    if (!acct.ok()) return acct.status();
    accountant = *std::move(acct);
    auto initial = accountant->DeltaSpent(config.eps_target);
    if (!initial.ok()) return initial.status();
    if (*initial >= config.delta) {
      return absl::FailedPreconditionError(absl::StrCat(
          "privacy budget exhausted before the first epoch: delta spent ", *initial,
          " at epsilon ", config.eps_target, " already exceeds ", config.delta));
    }
  }

  const std::vector<double> weights = NegativeWeightsFor(proximity, config.neg_weighting);
  result.model = InitModel(graph.num_nodes(), config.dim, config.seed);
  const SamplerOptions sampler = config.Sampler();

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.resample_negatives) {
      if (auto st = ResampleNegatives(graph, sampler, epoch, samples); !st.ok()) return st;
    }
    Rng batch_rng = MakeRng(config.seed, RngStream::kBatch, epoch);
    auto draw = SampleBatch(samples.size(), config.batch_size, batch_rng);
    if (!draw.ok()) return draw.status();

    double loss = 0.0;
    for (std::size_t index : draw->indices) {
      const auto& s = samples[index];
      auto l = SkipGramLoss(s, result.model, proximity(s.center, s.positive), weights[s.center]);
      if (!l.ok()) return l.status();
      loss += *l;
    }
    report.loss_trace.push_back(loss / static_cast<double>(draw->indices.size()));

    Rng noise_rng = MakeRng(config.seed, RngStream::kNoise, epoch);
    auto touched = BatchUpdate(result.model, samples, draw->indices, proximity, weights, config,
                               noise_rng);
    if (!touched.ok()) {
      return absl::Status(touched.status().code(),
                          absl::StrCat("epoch ", epoch, ": ", touched.status().message()));
    }
    report.epochs_completed = epoch + 1;

    if (is_private) {
      accountant->Compose(1);
      auto spent = accountant->DeltaSpent(config.eps_target);
      if (!spent.ok()) return spent.status();
      if (*spent >= config.delta) {
        report.stopped_by_budget = true;
        break;
      }
    }
  }

  if (is_private) {
    auto dp = accountant->ToDp(config.delta);
    if (!dp.ok()) return dp.status();
    report.epsilon = dp->epsilon;
    report.alpha = dp->alpha;
    report.delta_hat = *accountant->DeltaSpent(config.eps_target);
  } else {
    report.epsilon = std::numeric_limits<double>::infinity();
    report.delta_hat = 1.0;
  }
  return result;
}

absl::StatusOr<TrainResult> Train(const Graph& graph, const ProximityMatrix& proximity,
                                  const TrainConfig& config) {
  if (auto st = config.Validate(); !st.ok()) return st;
  auto samples = GenerateSubgraphs(graph, config.Sampler(), &proximity);
  if (!samples.ok()) return samples.status();
  return Train(graph, proximity, *std::move(samples), config);
}

}  // namespace dpgemb
