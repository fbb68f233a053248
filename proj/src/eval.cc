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

#include "dpgemb/eval.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "dpgemb/rng.h"

namespace dpgemb {
namespace {

// ||A_i - A_j||_2 for 0/1 rows: sqrt of the symmetric difference size.
double AdjacencyDistance(const Graph& graph, NodeId i, NodeId j) {
  auto a = graph.Neighbors(i);
  auto b = graph.Neighbors(j);
  std::size_t common = 0;
  for (std::size_t x = 0, y = 0; x < a.size() && y < b.size();) {
    if (a[x] == b[y]) {
      ++common;
      ++x;
      ++y;
    } else if (a[x] < b[y]) {
      ++x;
    } else {
      ++y;
    }
  }
  return std::sqrt(static_cast<double>(a.size() + b.size() - 2 * common));
}

double RowDistance(const DenseMatrix& m, NodeId i, NodeId j) {
  auto a = m.row(i);
  auto b = m.row(j);
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const double d = a[c] - b[c];
    s += d * d;
  }
  return std::sqrt(s);
}

absl::Status CheckEmbedding(const Graph& graph, const DenseMatrix& embedding) {
  if (embedding.rows() != graph.num_nodes()) {
    return absl::InvalidArgumentError(absl::StrCat("embedding has ", embedding.rows(),
                                                   " rows for a graph with ",
                                                   graph.num_nodes(), " nodes"));
  }
  if (graph.num_nodes() < 3) return absl::InvalidArgumentError("StrucEqu needs >= 3 nodes");
  return absl::OkStatus();
}

std::uint64_t PairKey(NodeId i, NodeId j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

}  // namespace

absl::StatusOr<double> Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    return absl::InvalidArgumentError("Pearson needs two series of equal length >= 2");
  }
  auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  // A constant series can leave a rounding-sized variance behind after
  // centering, so test it directly.
  if (constant(x) || constant(y)) {
    return absl::FailedPreconditionError("correlation undefined: a series has zero variance");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    return absl::FailedPreconditionError("correlation undefined: a series has zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

absl::StatusOr<double> StrucEqu(const Graph& graph, const DenseMatrix& embedding) {
  if (auto st = CheckEmbedding(graph, embedding); !st.ok()) return st;
  const std::size_t n = graph.num_nodes();
  std::vector<double> adj, emb;
  adj.reserve(n * (n - 1) / 2);
  emb.reserve(n * (n - 1) / 2);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      adj.push_back(AdjacencyDistance(graph, i, j));
      emb.push_back(RowDistance(embedding, i, j));
    }
  }
  return Pearson(adj, emb);
}

absl::StatusOr<double> SampledStrucEqu(const Graph& graph, const DenseMatrix& embedding,
                                       std::size_t num_pairs, std::uint64_t seed) {
  if (auto st = CheckEmbedding(graph, embedding); !st.ok()) return st;
  if (num_pairs < 2) return absl::InvalidArgumentError("need at least two sampled pairs");
  Rng rng = MakeRng(seed, RngStream::kEvalPairs);
  std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(graph.num_nodes() - 1));
  std::vector<double> adj, emb;
  adj.reserve(num_pairs);
  emb.reserve(num_pairs);
  while (adj.size() < num_pairs) {
    const NodeId i = pick(rng);
    const NodeId j = pick(rng);
    if (i == j) continue;
    adj.push_back(AdjacencyDistance(graph, i, j));
    emb.push_back(RowDistance(embedding, i, j));
  }
  return Pearson(adj, emb);
}

absl::StatusOr<LinkSplit> SplitLinks(const Graph& graph, double test_fraction,
                                     std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("test fraction must lie in (0, 1)");
  }
  const std::size_t num_edges = graph.num_edges();
  const std::size_t num_test = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(num_edges))));
  if (num_test >= num_edges) {
    return absl::FailedPreconditionError("split would leave no training edges");
  }
  const std::size_t n = graph.num_nodes();
  const std::size_t num_train = num_edges - num_test;
  const std::size_t non_edges = n * (n - 1) / 2 - num_edges;
  const std::size_t needed = num_test + num_train;
  if (needed > non_edges) {
    return absl::FailedPreconditionError(
        absl::StrCat("graph too dense: ", needed, " negative pairs needed but only ",
                     non_edges, " non-edges exist"));
  }

  Rng rng = MakeRng(seed, RngStream::kSplit);
  std::vector<Edge> edges(graph.edges().begin(), graph.edges().end());
  std::shuffle(edges.begin(), edges.end(), rng);

  LinkSplit split;
  split.test_pos.assign(edges.begin(), edges.begin() + num_test);
  std::vector<Edge> train_edges(edges.begin() + num_test, edges.end());
  auto train_graph = Graph::FromEdges(n, train_edges);
  if (!train_graph.ok()) return train_graph.status();
  split.train_graph = *std::move(train_graph);

  std::vector<Edge> negatives;
  negatives.reserve(needed);
  if (4 * needed >= non_edges) {
    // Dense regime: enumerate every non-edge and take a random prefix.
    std::vector<Edge> all;
    all.reserve(non_edges);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (!graph.Adjacent(i, j)) all.push_back({i, j});
      }
    }
    std::shuffle(all.begin(), all.end(), rng);
    negatives.assign(all.begin(), all.begin() + needed);
  } else {
    absl::flat_hash_set<std::uint64_t> seen;
    std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
    while (negatives.size() < needed) {
      const NodeId i = pick(rng);
      const NodeId j = pick(rng);
      if (i == j || graph.Adjacent(i, j) || !seen.insert(PairKey(i, j)).second) continue;
      negatives.push_back({std::min(i, j), std::max(i, j)});
    }
  }
  split.test_neg.assign(negatives.begin(), negatives.begin() + num_test);
  split.train_neg.assign(negatives.begin() + num_test, negatives.end());
  return split;
}

absl::StatusOr<double> AucFromScores(std::span<const double> positive_scores,
                                     std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    return absl::InvalidArgumentError("AUC needs at least one positive and one negative");
  }
  struct Scored {
    double score;
    bool positive;
  };
  std::vector<Scored> all;
  all.reserve(positive_scores.size() + negative_scores.size());
  for (double s : positive_scores) all.push_back({s, true});
  for (double s : negative_scores) all.push_back({s, false});
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });

  // Sum of midranks of the positives (1-based ranks; ties share the average).
  double positive_rank_sum = 0.0;
  for (std::size_t lo = 0; lo < all.size();) {
    std::size_t hi = lo;
    std::size_t pos_in_group = 0;
    while (hi < all.size() && all[hi].score == all[lo].score) {
      pos_in_group += all[hi].positive ? 1 : 0;
      ++hi;
    }
    const double midrank = 0.5 * static_cast<double>(lo + 1 + hi);
    positive_rank_sum += midrank * static_cast<double>(pos_in_group);
    lo = hi;
  }
  const double np = static_cast<double>(positive_scores.size());
  const double nn = static_cast<double>(negative_scores.size());
  return (positive_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

absl::StatusOr<double> LinkPredictionAuc(const EmbeddingModel& model, const LinkSplit& split) {
  if (split.test_pos.empty() || split.test_neg.empty()) {
    return absl::InvalidArgumentError("link split has an empty test set");
  }
  auto score = [&](const Edge& e) -> absl::StatusOr<double> {
    if (e.first >= model.num_nodes() || e.second >= model.num_nodes()) {
      return absl::OutOfRangeError("test pair outside the embedding");
    }
    return Sigmoid(Dot(model.w_in.row(e.first), model.w_in.row(e.second)));
  };
  std::vector<double> pos, neg;
  for (const Edge& e : split.test_pos) {
    auto s = score(e);
    if (!s.ok()) return s.status();
    pos.push_back(*s);
  }
  for (const Edge& e : split.test_neg) {
    auto s = score(e);
    if (!s.ok()) return s.status();
    neg.push_back(*s);
  }
  return AucFromScores(pos, neg);
}

double FixedPointTarget(double p, double min_p, std::size_t k) {
  return std::log(p / (static_cast<double>(k) * min_p));
}

absl::StatusOr<FixedPointResidual> ComputeFixedPointResidual(const EmbeddingModel& model,
                                                             const Graph& graph,
                                                             const ProximityMatrix& proximity,
                                                             std::size_t k,
                                                             ResidualPairs pairs) {
  if (model.num_nodes() != graph.num_nodes() || proximity.num_nodes() != graph.num_nodes()) {
    return absl::InvalidArgumentError("model, graph and proximity sizes differ");
  }
  if (k == 0) return absl::InvalidArgumentError("k must be >= 1");
  double total = 0.0;
  for (double s : proximity.row_sums()) total += s;

  FixedPointResidual out;
  auto visit = [&](NodeId i, NodeId j) -> absl::Status {
    const double p = proximity(i, j);
    if (!(p > 0.0)) {
      return absl::FailedPreconditionError(
          absl::StrCat("pair (", i, ", ", j, ") has nonpositive proximity"));
    }
    const double x = Dot(model.w_in.row(i), model.w_out.row(j));
    const double r = std::abs(x - FixedPointTarget(p, proximity.min_positive(), k));
    const double di = static_cast<double>(graph.DegreeUnchecked(i));
    const double dj = static_cast<double>(graph.DegreeUnchecked(j));
    const double prior_target = std::log(p * total / (di * dj)) - std::log(static_cast<double>(k));
    const double rp = std::abs(x - prior_target);
    ++out.pairs;
    out.mean_abs += r;
    out.max_abs = std::max(out.max_abs, r);
    out.prior_mean_abs += rp;
    out.prior_max_abs = std::max(out.prior_max_abs, rp);
    return absl::OkStatus();
  };
  for (const Edge& e : graph.edges()) {
    if (auto st = visit(e.first, e.second); !st.ok()) return st;
    if (pairs == ResidualPairs::kBothOrientations) {
      if (auto st = visit(e.second, e.first); !st.ok()) return st;
    }
  }
  if (out.pairs == 0) return absl::FailedPreconditionError("graph has no edges to evaluate");
  out.mean_abs /= static_cast<double>(out.pairs);
  out.prior_mean_abs /= static_cast<double>(out.pairs);
  return out;
}

}  // namespace dpgemb
