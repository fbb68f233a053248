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

#include "dpgemb/sampler.h"

#include <fstream>
#include <numeric>
#include <sstream>

#include "absl/strings/str_cat.h"

namespace dpgemb {
namespace {

// Per-epoch resampling streams live above this offset, clear of the
// per-sample streams of the initial draw.
constexpr std::uint64_t kEpochStreamShift = 32;

absl::Status DrawNegativesInto(const Graph& graph, const SamplerOptions& options, NodeId center,
                               Rng& rng, std::vector<NodeId>& out) {
  const std::size_t n = graph.num_nodes();
  std::uniform_int_distribution<NodeId> uniform(0, static_cast<NodeId>(n - 1));
  out.clear();
  out.reserve(options.k);
  if (!options.reject_neighbors) {
    for (std::size_t s = 0; s < options.k; ++s) out.push_back(uniform(rng));
    return absl::OkStatus();
  }
  if (graph.DegreeUnchecked(center) + 1 >= n) {
    return absl::FailedPreconditionError(
        absl::StrCat("node ", center,
                     " is adjacent to every other node; no valid negative sample exists"));
  }
  const std::size_t budget = options.retry_factor * options.k;
  for (std::size_t s = 0; s < options.k; ++s) {
    std::size_t draws = 0;
    while (true) {
      if (draws++ == budget) {
        return absl::ResourceExhaustedError(
            absl::StrCat("negative sampling for node ", center, " exceeded ", budget,
                         " draws for one slot"));
      }
      const NodeId candidate = uniform(rng);
      if (candidate != center && !graph.Adjacent(center, candidate)) {
        out.push_back(candidate);
        break;
      }
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<NodeId>> DrawNegatives(const Graph& graph,
                                                  const SamplerOptions& options, NodeId center,
                                                  Rng& rng) {
  if (options.k == 0) return absl::InvalidArgumentError("k must be >= 1");
  if (center >= graph.num_nodes()) {
    return absl::OutOfRangeError(absl::StrCat("node ", center, " out of range"));
  }
  std::vector<NodeId> out;
  if (auto st = DrawNegativesInto(graph, options, center, rng, out); !st.ok()) return st;
  return out;
}

absl::StatusOr<std::vector<SubgraphSample>> GenerateSubgraphs(const Graph& graph,
                                                              const SamplerOptions& options,
                                                              const ProximityMatrix* proximity) {
  if (options.k == 0) return absl::InvalidArgumentError("k must be >= 1");
  if (graph.num_edges() == 0) return absl::FailedPreconditionError("graph has no edges");

  std::vector<SubgraphSample> samples;
  switch (options.positives) {
    case PositiveSet::kEdges:
      samples.reserve(graph.num_edges());
      for (const Edge& e : graph.edges()) samples.push_back({e.first, e.second, {}});
      break;
    case PositiveSet::kEdgesBothDirections:
      samples.reserve(2 * graph.num_edges());
      for (const Edge& e : graph.edges()) {
        samples.push_back({e.first, e.second, {}});
        samples.push_back({e.second, e.first, {}});
      }
      break;
    case PositiveSet::kProximitySupport:
      if (proximity == nullptr || proximity->num_nodes() != graph.num_nodes()) {
        return absl::InvalidArgumentError(
            "proximity-support positives need a proximity matrix matching the graph");
      }
      for (NodeId i = 0; i < graph.num_nodes(); ++i) {
        for (NodeId j = 0; j < graph.num_nodes(); ++j) {
          if ((*proximity)(i, j) > 0.0) samples.push_back({i, j, {}});
        }
      }
      break;
  }

  for (std::size_t s = 0; s < samples.size(); ++s) {
    Rng rng = MakeRng(options.seed, RngStream::kNegatives, s);
    if (auto st =
            DrawNegativesInto(graph, options, samples[s].center, rng, samples[s].negatives);
        !st.ok()) {
      return st;
    }
  }
  return samples;
}

absl::Status ResampleNegatives(const Graph& graph, const SamplerOptions& options,
                               std::uint64_t epoch, std::vector<SubgraphSample>& samples) {
  // One stream per epoch, consumed in sample order.
  Rng rng = MakeRng(options.seed, RngStream::kNegatives, (epoch + 1) << kEpochStreamShift);
  for (auto& sample : samples) {
    if (auto st = DrawNegativesInto(graph, options, sample.center, rng, sample.negatives);
        !st.ok()) {
      return st;
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<BatchDraw> SampleBatch(std::size_t num_samples, std::size_t batch_size, Rng& rng) {
  if (batch_size == 0 || batch_size > num_samples) {
    return absl::InvalidArgumentError(absl::StrCat("batch size ", batch_size,
                                                   " must lie in [1, ", num_samples, "]"));
  }
  // Partial Fisher-Yates: the first B slots end up a uniform B-subset.
  std::vector<std::size_t> pool(num_samples);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, num_samples - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(batch_size);
  return BatchDraw{std::move(pool),
                   static_cast<double>(batch_size) / static_cast<double>(num_samples)};
}

absl::Status WriteSubgraphCache(const std::vector<SubgraphSample>& samples,
                                const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (const auto& s : samples) {
    out << s.center << ' ' << s.positive;
    for (NodeId n : s.negatives) out << ' ' << n;
    out << '\n';
  }
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

absl::StatusOr<std::vector<SubgraphSample>> ReadSubgraphCache(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open subgraph cache ", path));
  std::vector<SubgraphSample> samples;
  std::string line;
  std::size_t line_no = 0;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    SubgraphSample s;
    if (!(fields >> s.center >> s.positive)) {
      return absl::DataLossError(absl::StrCat(path, ":", line_no, ": malformed sample"));
    }
    NodeId n;
    while (fields >> n) s.negatives.push_back(n);
    if (!fields.eof()) {
      return absl::DataLossError(absl::StrCat(path, ":", line_no, ": malformed negative id"));
    }
    if (samples.empty()) k = s.negatives.size();
    if (s.negatives.size() != k || k == 0) {
      return absl::DataLossError(
          absl::StrCat(path, ":", line_no, ": expected ", k, " negatives"));
    }
    samples.push_back(std::move(s));
  }
  if (samples.empty()) return absl::DataLossError(absl::StrCat(path, " holds no samples"));
  return samples;
}

}  // namespace dpgemb
