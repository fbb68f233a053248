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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion with
// the measured quantities and exits nonzero if any criterion fails. Every
// tolerance and runtime limit lives in this file.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dpgemb/eval.h"
#include "dpgemb/proximity.h"
#include "dpgemb/rdp_accountant.h"
#include "dpgemb/sampler.h"
#include "dpgemb/skipgram.h"
#include "dpgemb/trainer.h"
#include "rdp_oracle.h"
#include "test_util.h"

namespace dpgemb {
namespace {

// Tolerances and limits.
constexpr int kGradientInstances = 150;
constexpr double kGradientRelTol = 1e-4;
constexpr double kGradientSeconds = 10.0;

constexpr double kFixedPointMeanTol = 0.2;
constexpr double kScalarMinimizerTol = 1e-6;
constexpr double kFixedPointSeconds = 60.0;

constexpr double kAccountantTol = 1e-9;
constexpr double kAccountantSeconds = 5.0;

constexpr int kLocalityBatches = 1000;

constexpr int kTrendSeeds = 10;
constexpr double kTrendStandardErrors = 2.0;
constexpr double kTrendSeconds = 600.0;

constexpr double kMetricTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Gradient oracle.

// Loss of one subgraph written from scratch with naive sigmoid logs; the
// instances below keep inner products small enough for this to be accurate.
double ScalarLoss(const EmbeddingModel& m, const SubgraphSample& s, double p, double w) {
  auto dot = [&](NodeId a, NodeId b) {
    double x = 0.0;
    for (std::size_t c = 0; c < m.dim(); ++c) x += m.w_in(a, c) * m.w_out(b, c);
    return x;
  };
  auto log_sig = [](double x) { return std::log(1.0 / (1.0 + std::exp(-x))); };
  double neg = 0.0;
  for (NodeId n : s.negatives) neg += log_sig(-dot(s.center, n));
  return -p * (log_sig(dot(s.center, s.positive)) + w * neg);
}

Outcome GradientOracle() {
  constexpr double kStep = 1e-5;
  std::mt19937_64 rng(20260101);
  std::uniform_int_distribution<int> n_dist(2, 8), r_dist(1, 4), k_dist(1, 3);
  std::normal_distribution<double> normal(0.0, 0.7);
  std::uniform_real_distribution<double> positive(0.05, 2.0);
  double worst = 0.0;
  std::size_t coordinates = 0;
  for (int trial = 0; trial < kGradientInstances; ++trial) {
    const std::size_t n = n_dist(rng), r = r_dist(rng), k = k_dist(rng);
    EmbeddingModel m{DenseMatrix(n, r), DenseMatrix(n, r)};
    for (double& v : m.w_in.data()) v = normal(rng);
    for (double& v : m.w_out.data()) v = normal(rng);
    std::uniform_int_distribution<NodeId> node(0, static_cast<NodeId>(n - 1));
    SubgraphSample s{node(rng), node(rng), {}};
    for (std::size_t i = 0; i < k; ++i) s.negatives.push_back(node(rng));
    const double p = positive(rng), w = positive(rng);

    auto fd = [&](DenseMatrix& table, NodeId row, std::size_t col) {
      const double orig = table(row, col);
      table(row, col) = orig + kStep;
      const double up = ScalarLoss(m, s, p, w);
      table(row, col) = orig - kStep;
      const double down = ScalarLoss(m, s, p, w);
      table(row, col) = orig;
      return (up - down) / (2.0 * kStep);
    };
    auto rel = [](double a, double b) {
      return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
    };
    auto center = GradCenter(s, m, p, w);
    if (!center.ok()) return {false, std::string(center.status().message())};
    for (std::size_t c = 0; c < r; ++c) {
      worst = std::max(worst, rel((*center)[c], fd(m.w_in, s.center, c)));
      ++coordinates;
    }
    const SampleGradient full = ComputeSampleGradient(s, m, p, w);
    for (const auto& [row, grad] : full.context_grads) {
      for (std::size_t c = 0; c < r; ++c) {
        worst = std::max(worst, rel(grad[c], fd(m.w_out, row, c)));
        ++coordinates;
      }
    }
  }
  return {worst < kGradientRelTol,
          absl::StrFormat("%d instances, %u coordinates, max rel err %.3g (limit %g)",
                          kGradientInstances, coordinates, worst, kGradientRelTol)};
}

// ---------------------------------------------------------------------------
// Fixed point.

// Golden-section minimizer of the per-pair objective
// -p log sigmoid(x) - k min(P) log sigmoid(-x), which is strictly convex.
double GoldenSectionMinimizer(double p, double negative_mass) {
  auto f = [&](double x) { return -p * LogSigmoid(x) - negative_mass * LogSigmoid(-x); };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = -60.0, b = 60.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

Outcome FixedPoint() {
  std::string detail;
  bool pass = true;
  double worst_scalar = 0.0;
  for (int gi = 0; gi < 3; ++gi) {
    const std::size_t n = 6 + 2 * gi;
    const Graph g = testing::RandomGraph(n, 0.45, 100 + gi);
    auto p = DeepWalkProximity(g, 2);
    if (!p.ok()) return {false, std::string(p.status().message())};

    TrainConfig config;
    config.mode = PerturbationMode::kNoNoise;
    config.neg_weighting = NegativeWeighting::kTheoretical;
    config.reject_neighbors = false;
    // Positives cover every pair with p_ij > 0 so the training objective is
    // the full weighted sum; fresh negatives each epoch make the stochastic
    // negative term unbiased.
    config.positives = PositiveSet::kProximitySupport;
    config.resample_negatives = true;
    config.dim = n;
    config.k = 5;
    config.eta = 1.0;
    config.max_epochs = 40000;
    config.seed = 7;
    auto samples = GenerateSubgraphs(g, config.Sampler(), &*p);
    if (!samples.ok()) return {false, std::string(samples.status().message())};
    config.batch_size = samples->size();
    auto result = Train(g, *p, *samples, config);
    if (!result.ok()) return {false, std::string(result.status().message())};
    auto residual = ComputeFixedPointResidual(result->model, g, *p, config.k,
                                              ResidualPairs::kBothOrientations);
    if (!residual.ok()) return {false, std::string(residual.status().message())};
    pass = pass && residual->mean_abs <= kFixedPointMeanTol;
    absl::StrAppendFormat(&detail, "n=%u mean %.4f (prior-work target %.4f); ", n,
                          residual->mean_abs, residual->prior_mean_abs);

    std::set<double> values;
    for (double v : p->values().data()) {
      if (v > 0.0) values.insert(v);
    }
    for (double v : values) {
      const double numeric =
          GoldenSectionMinimizer(v, static_cast<double>(config.k) * p->min_positive());
      worst_scalar = std::max(
          worst_scalar, std::abs(numeric - FixedPointTarget(v, p->min_positive(), config.k)));
    }
  }
  pass = pass && worst_scalar <= kScalarMinimizerTol;
  absl::StrAppendFormat(&detail, "limit %g; scalar minimizer max gap %.2g (limit %g)",
                        kFixedPointMeanTol, worst_scalar, kScalarMinimizerTol);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Accountant.

Outcome Accountant() {
  constexpr double kS = 2.0;
  double worst = 0.0;
  int amplification_violations = 0;
  int evaluations = 0;
  for (double gamma : {0.001, 0.01, 0.1, 1.0}) {
    for (double sigma : {1.0, 5.0, 10.0}) {
      for (int alpha = 2; alpha <= 64; ++alpha) {
        auto got = SubsampledGaussianRdp(alpha, gamma, kS, sigma);
        if (!got.ok()) return {false, std::string(got.status().message())};
        const long double want = testing::OracleSubsampledRdp(alpha, gamma, kS, sigma);
        worst = std::max(worst, std::abs(*got - static_cast<double>(want)));
        ++evaluations;
        if (gamma < 1.0 && !(*got < alpha * kS * kS / (2.0 * sigma * sigma))) {
          ++amplification_violations;
        }
      }
    }
  }
  return {worst <= kAccountantTol && amplification_violations == 0,
          absl::StrFormat("%d evaluations, max abs diff %.3g (limit %g), %d amplification "
                          "violations",
                          evaluations, worst, kAccountantTol, amplification_violations)};
}

// ---------------------------------------------------------------------------
// Stopping rule.

Outcome StoppingRule() {
  // 200 nodes with 2 neighbors each side: exactly 400 edges, so B = 4 gives
  // gamma = 0.01.
  const Graph g = testing::WattsStrogatz(200, 2, 0.3, 11);
  if (g.num_edges() != 400) return {false, "fixture does not have 400 edges"};
  auto p = DegreeProximity(g);
  if (!p.ok()) return {false, std::string(p.status().message())};
  TrainConfig config;
  config.mode = PerturbationMode::kNonZero;
  config.sigma = 5.0;
  config.delta = 1e-5;
  config.clip = 2.0;
  config.eps_target = 3.5;
  config.batch_size = 4;
  config.dim = 16;
  config.max_epochs = 10'000'000;
  auto result = Train(g, *p, config);
  if (!result.ok()) return {false, std::string(result.status().message())};
  const std::uint64_t want =
      testing::OracleStoppingEpoch(0.01L, 2.0L, 5.0L, 3.5L, 1e-5L, config.max_epochs);
  const bool pass = want > 0 && result->report.epochs_completed == want &&
                    result->report.stopped_by_budget && result->report.gamma == 0.01;
  return {pass, absl::StrFormat("trainer stopped after %u epochs, oracle %u, delta_hat %.4g",
                                result->report.epochs_completed, want,
                                result->report.delta_hat)};
}

// ---------------------------------------------------------------------------
// Locality.

Outcome Locality() {
  const Graph g = testing::RandomGraph(50, 0.1, 31);
  auto p = DegreeProximity(g);
  if (!p.ok()) return {false, std::string(p.status().message())};
  TrainConfig config;
  config.mode = PerturbationMode::kNonZero;
  config.batch_size = 4;
  config.dim = 16;
  auto samples = GenerateSubgraphs(g, config.Sampler());
  if (!samples.ok()) return {false, std::string(samples.status().message())};
  const std::vector<double> weights = NegativeWeights(*p);
  EmbeddingModel m = InitModel(50, config.dim, 5);
  // Give W_out nonzero content so an accidental write is visible.
  for (double& v : m.w_out.data()) v = 0.01;
  std::size_t violations = 0, touched_unchanged = 0, rows_checked = 0;
  for (int step = 0; step < kLocalityBatches; ++step) {
    Rng batch_rng = MakeRng(5, RngStream::kBatch, step);
    auto draw = SampleBatch(samples->size(), config.batch_size, batch_rng);
    if (!draw.ok()) return {false, std::string(draw.status().message())};
    std::set<NodeId> in_rows, out_rows;
    for (std::size_t idx : draw->indices) {
      const SubgraphSample& s = (*samples)[idx];
      in_rows.insert(s.center);
      out_rows.insert(s.positive);
      out_rows.insert(s.negatives.begin(), s.negatives.end());
    }
    const EmbeddingModel before = m;
    Rng noise = MakeRng(5, RngStream::kNoise, step);
    auto touched = BatchUpdate(m, *samples, draw->indices, *p, weights, config, noise);
    if (!touched.ok()) return {false, std::string(touched.status().message())};
    for (NodeId v = 0; v < 50; ++v) {
      const bool in_same = std::ranges::equal(m.w_in.row(v), before.w_in.row(v));
      const bool out_same = std::ranges::equal(m.w_out.row(v), before.w_out.row(v));
      if (!in_rows.count(v) && !in_same) ++violations;
      if (!out_rows.count(v) && !out_same) ++violations;
      if (in_rows.count(v) && in_same) ++touched_unchanged;
      if (out_rows.count(v) && out_same) ++touched_unchanged;
      rows_checked += 2;
    }
  }
  return {violations == 0 && touched_unchanged == 0,
          absl::StrFormat("%d batches, %u rows checked, %u untouched rows modified, %u touched "
                          "rows left without noise",
                          kLocalityBatches, rows_checked, violations, touched_unchanged)};
}

// ---------------------------------------------------------------------------
// Trends on a 300-node ring-plus-rewiring graph at the default operating
// point (B=128, C=2, sigma=5, k=5, r=128, eta=0.1, up to 200 epochs).

struct SeedStats {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t epochs = 0;
};

absl::StatusOr<SeedStats> StrucEquOverSeeds(const Graph& g, const ProximityMatrix& p,
                                            PerturbationMode mode, double eps) {
  std::vector<double> scores;
  SeedStats stats;
  for (int seed = 1; seed <= kTrendSeeds; ++seed) {
    TrainConfig config;
    config.mode = mode;
    config.eps_target = eps;
    config.seed = seed;
    auto result = Train(g, p, config);
    if (!result.ok()) return result.status();
    auto score = StrucEqu(g, result->model.w_in);
    if (!score.ok()) return score.status();
    scores.push_back(*score);
    stats.epochs = result->report.epochs_completed;
  }
  const double n = static_cast<double>(scores.size());
  for (double s : scores) stats.mean += s / n;
  double ss = 0.0;
  for (double s : scores) ss += (s - stats.mean) * (s - stats.mean);
  stats.stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return stats;
}

Graph TrendGraph() { return testing::WattsStrogatz(300, 3, 0.5, 42); }

absl::StatusOr<ProximityMatrix> TrendProximity(const Graph& g, ProximityKind kind) {
  return kind == ProximityKind::kDegree ? DegreeProximity(g) : DeepWalkProximity(g);
}

Outcome PerturbationTrend() {
  const Graph g = TrendGraph();
  bool pass = true;
  std::string detail;
  for (ProximityKind kind : {ProximityKind::kDegree, ProximityKind::kDeepWalk}) {
    auto p = TrendProximity(g, kind);
    if (!p.ok()) return {false, std::string(p.status().message())};
    auto nonzero = StrucEquOverSeeds(g, *p, PerturbationMode::kNonZero, 3.5);
    auto naive = StrucEquOverSeeds(g, *p, PerturbationMode::kNaive, 3.5);
    if (!nonzero.ok()) return {false, std::string(nonzero.status().message())};
    if (!naive.ok()) return {false, std::string(naive.status().message())};
    const double pooled = std::hypot(nonzero->stderr_, naive->stderr_);
    const double margin = nonzero->mean - naive->mean;
    pass = pass && margin > kTrendStandardErrors * pooled;
    absl::StrAppendFormat(&detail, "%s: nonzero %.4f vs naive %.4f, margin %.1f SE (%u epochs); ",
                          std::string(ProximityKindName(kind)), nonzero->mean, naive->mean, margin / pooled,
                          nonzero->epochs);
  }
  absl::StrAppendFormat(&detail, "need > %g SE", kTrendStandardErrors);
  return {pass, detail};
}

Outcome BudgetTrend() {
  const Graph g = TrendGraph();
  bool pass = true;
  std::string detail;
  for (ProximityKind kind : {ProximityKind::kDegree, ProximityKind::kDeepWalk}) {
    auto p = TrendProximity(g, kind);
    if (!p.ok()) return {false, std::string(p.status().message())};
    auto high = StrucEquOverSeeds(g, *p, PerturbationMode::kNonZero, 3.5);
    auto low = StrucEquOverSeeds(g, *p, PerturbationMode::kNonZero, 0.5);
    if (!high.ok()) return {false, std::string(high.status().message())};
    if (!low.ok()) return {false, std::string(low.status().message())};
    pass = pass && high->mean >= low->mean;
    absl::StrAppendFormat(&detail, "%s: eps 3.5 -> %.4f (%u epochs), eps 0.5 -> %.4f (%u epochs); ",
                          std::string(ProximityKindName(kind)), high->mean, high->epochs, low->mean,
                          low->epochs);
  }
  detail.resize(detail.size() - 2);
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// Metric oracles.

double BruteForceStrucEqu(const Graph& g, const DenseMatrix& emb) {
  const std::size_t n = g.num_nodes();
  DenseMatrix a(n, n);
  for (const Edge& e : g.edges()) {
    a(e.first, e.second) = 1.0;
    a(e.second, e.first) = 1.0;
  }
  auto dist = [](const DenseMatrix& m, std::size_t i, std::size_t j) {
    long double s = 0.0L;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const long double d = static_cast<long double>(m(i, c)) - m(j, c);
      s += d * d;
    }
    return std::sqrt(s);
  };
  std::vector<long double> x, y;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      x.push_back(dist(a, i, j));
      y.push_back(dist(emb, i, j));
    }
  }
  long double mx = 0, my = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    mx += x[t] / x.size();
    my += y[t] / y.size();
  }
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sxy += (x[t] - mx) * (y[t] - my);
    sxx += (x[t] - mx) * (x[t] - mx);
    syy += (y[t] - my) * (y[t] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

double BruteForceAuc(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  }
  return wins / static_cast<double>(pos.size() * neg.size());
}

Outcome MetricOracles() {
  double worst_struc = 0.0, worst_auc = 0.0;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  const std::vector<Graph> fixtures = {testing::PathGraph(5), testing::StarGraph(6),
                                       testing::CycleGraph(9), testing::RandomGraph(30, 0.2, 3),
                                       testing::WattsStrogatz(60, 2, 0.3, 4)};
  for (const Graph& g : fixtures) {
    DenseMatrix emb(g.num_nodes(), 4);
    for (double& v : emb.data()) v = normal(rng);
    auto got = StrucEqu(g, emb);
    if (!got.ok()) return {false, std::string(got.status().message())};
    worst_struc = std::max(worst_struc, std::abs(*got - BruteForceStrucEqu(g, emb)));
  }
  std::uniform_int_distribution<int> coarse(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> pos(1 + trial % 9), neg(1 + trial % 7);
    for (double& v : pos) v = trial % 2 ? normal(rng) : coarse(rng);
    for (double& v : neg) v = trial % 2 ? normal(rng) : coarse(rng);
    auto got = AucFromScores(pos, neg);
    if (!got.ok()) return {false, std::string(got.status().message())};
    worst_auc = std::max(worst_auc, std::abs(*got - BruteForceAuc(pos, neg)));
  }
  const std::vector<double> high = {0.9, 0.8, 0.75}, low = {0.1, 0.2, 0.3, 0.4};
  const std::vector<double> ties(5, 0.5);
  const double perfect = *AucFromScores(high, low);
  const double all_ties = *AucFromScores(ties, ties);
  const bool pass = worst_struc <= kMetricTol && worst_auc <= kMetricTol && perfect == 1.0 &&
                    all_ties == 0.5;
  return {pass, absl::StrFormat("struc_equ max diff %.2g, auc max diff %.2g (limit %g), "
                                "perfect %.17g, all ties %.17g",
                                worst_struc, worst_auc, kMetricTol, perfect, all_ties)};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
  double max_seconds;  // 0 means no runtime limit
};

}  // namespace
}  // namespace dpgemb

int main() {
  using dpgemb::Criterion;
  const std::vector<Criterion> criteria = {
      {"gradient-oracle", dpgemb::GradientOracle, dpgemb::kGradientSeconds},
      {"fixed-point", dpgemb::FixedPoint, dpgemb::kFixedPointSeconds},
      {"accountant-exactness", dpgemb::Accountant, dpgemb::kAccountantSeconds},
      {"stopping-rule", dpgemb::StoppingRule, 0.0},
      {"nonzero-locality", dpgemb::Locality, 0.0},
      {"perturbation-trend", dpgemb::PerturbationTrend, dpgemb::kTrendSeconds},
      {"budget-trend", dpgemb::BudgetTrend, 0.0},
      {"metric-oracles", dpgemb::MetricOracles, 0.0},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    dpgemb::Outcome outcome = c.run();
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool pass = outcome.pass;
    std::string timing = absl::StrFormat("%.2fs", seconds);
    if (c.max_seconds > 0.0) {
      absl::StrAppendFormat(&timing, " of %gs", c.max_seconds);
      pass = pass && seconds < c.max_seconds;
    }
    std::printf("%s %s: %s [%s]\n", pass ? "PASS" : "FAIL", c.name, outcome.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
