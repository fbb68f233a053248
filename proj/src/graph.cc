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

#include "dpgemb/graph.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "absl/strings/str_cat.h"

namespace dpgemb {

absl::StatusOr<Graph> Graph::FromEdges(std::size_t num_nodes,
                                       std::span<const Edge> edges) {
  if (num_nodes > std::numeric_limits<NodeId>::max()) {
    return absl::InvalidArgumentError(
        absl::StrCat("node count ", num_nodes, " exceeds the id range"));
  }
  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.first >= num_nodes || e.second >= num_nodes) {
      return absl::OutOfRangeError(absl::StrCat("edge (", e.first, ", ", e.second,
                                                ") references a node outside [0, ",
                                                num_nodes, ")"));
    }
    if (e.first == e.second) continue;
    canonical.push_back({std::min(e.first, e.second), std::max(e.first, e.second)});
  }
  std::sort(canonical.begin(), canonical.end());
  canonical.erase(std::unique(canonical.begin(), canonical.end()), canonical.end());

  Graph g;
  g.offsets_.assign(num_nodes + 1, 0);
  for (const Edge& e : canonical) {
    ++g.offsets_[e.first + 1];
    ++g.offsets_[e.second + 1];
  }
  for (std::size_t v = 0; v < num_nodes; ++v) g.offsets_[v + 1] += g.offsets_[v];
  g.neighbors_.resize(2 * canonical.size());
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const Edge& e : canonical) {
    g.neighbors_[cursor[e.first]++] = e.second;
    g.neighbors_[cursor[e.second]++] = e.first;
  }
  // Lexicographic edge order delivers the smaller neighbors of v (as
  // e.second) before the larger ones (as e.first), each ascending, so the
  // lists come out sorted.
  g.edges_ = std::move(canonical);
  return g;
}

bool Graph::Adjacent(NodeId i, NodeId j) const {
  // Search the shorter list.
  if (DegreeUnchecked(i) > DegreeUnchecked(j)) std::swap(i, j);
  auto nbrs = Neighbors(i);
  return std::binary_search(nbrs.begin(), nbrs.end(), j);
}

absl::StatusOr<bool> Graph::HasEdge(NodeId i, NodeId j) const {
  if (i >= num_nodes() || j >= num_nodes()) {
    return absl::OutOfRangeError(
        absl::StrCat("node pair (", i, ", ", j, ") outside [0, ", num_nodes(), ")"));
  }
  return Adjacent(i, j);
}

absl::StatusOr<std::size_t> Graph::Degree(NodeId v) const {
  if (v >= num_nodes()) {
    return absl::OutOfRangeError(
        absl::StrCat("node ", v, " outside [0, ", num_nodes(), ")"));
  }
  return DegreeUnchecked(v);
}

namespace {

std::vector<std::string_view> SplitWhitespace(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

}  // namespace

absl::StatusOr<LoadedGraph> LoadEdgeList(std::istream& in, const LoadOptions& options) {
  LoadedGraph result;
  std::unordered_map<std::string, NodeId> dense_ids;
  std::vector<Edge> raw;
  std::size_t max_id_plus_one = 0;

  auto resolve = [&](std::string_view token, std::size_t line_no) -> absl::StatusOr<NodeId> {
    if (options.relabel) {
      auto [it, inserted] =
          dense_ids.try_emplace(std::string(token), static_cast<NodeId>(dense_ids.size()));
      if (inserted) result.original_ids.emplace_back(token);
      return it->second;
    }
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() ||
        value >= std::numeric_limits<NodeId>::max()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "line ", line_no, ": token '", std::string(token),
          "' is not a node id (pass relabel to accept arbitrary ids)"));
    }
    return static_cast<NodeId>(value);
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto tokens = SplitWhitespace(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() < 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected two node tokens"));
    }
    auto u = resolve(tokens[0], line_no);
    if (!u.ok()) return u.status();
    auto v = resolve(tokens[1], line_no);
    if (!v.ok()) return v.status();
    if (*u == *v) {
      ++result.self_loops_dropped;
    } else {
      raw.push_back({*u, *v});
    }
    max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(*u, *v) + std::size_t{1});
  }

  std::size_t num_nodes = options.relabel ? dense_ids.size() : max_id_plus_one;
  if (options.declared_num_nodes.has_value()) {
    const std::size_t declared = *options.declared_num_nodes;
    if (num_nodes > declared || (options.relabel && num_nodes != declared)) {
      return absl::InvalidArgumentError(
          absl::StrCat("edge list describes ", num_nodes, " nodes but ", declared,
                       " were declared"));
    }
    num_nodes = declared;
  }
  if (num_nodes == 0 || raw.empty()) {
    return absl::InvalidArgumentError("edge list contains no edges");
  }

  auto graph = Graph::FromEdges(num_nodes, raw);
  if (!graph.ok()) return graph.status();
  result.duplicates_dropped = raw.size() - graph->num_edges();
  result.graph = *std::move(graph);
  return result;
}

absl::StatusOr<LoadedGraph> LoadEdgeListFile(const std::string& path,
                                             const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open edge list ", path));
  return LoadEdgeList(in, options);
}

void WriteEdgeList(const Graph& graph, std::ostream& out) {
  for (const Edge& e : graph.edges()) out << e.first << ' ' << e.second << '\n';
}

absl::Status WriteRelabelMap(std::span<const std::string> original_ids,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (std::size_t i = 0; i < original_ids.size(); ++i) {
    out << original_ids[i] << '\t' << i << '\n';
  }
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

}  // namespace dpgemb
