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

#ifndef DPGEMB_GRAPH_H_
#define DPGEMB_GRAPH_H_

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpgemb {

using NodeId = std::uint32_t;

// Undirected edge stored in canonical order (first < second).
struct Edge {
  NodeId first;
  NodeId second;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Immutable undirected simple graph in compressed adjacency layout.
//
// Node ids are dense in [0, num_nodes). Neighbor lists are sorted, there are
// no self-loops and no parallel edges. Isolated nodes are allowed.
class Graph {
 public:
  Graph() = default;

  // Builds a graph from an arbitrary edge list. Self-loops are dropped and
  // duplicates (in either orientation) are merged. Fails if an endpoint is
  // outside [0, num_nodes).
  static absl::StatusOr<Graph> FromEdges(std::size_t num_nodes,
                                         std::span<const Edge> edges);

  std::size_t num_nodes() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return edges_.size(); }

  // Canonical (i < j) edge list in lexicographic order.
  std::span<const Edge> edges() const { return edges_; }

  // Sorted neighbors of `v`. `v` must be a valid id.
  std::span<const NodeId> Neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }

  // Unchecked adjacency test for hot loops; ids must be valid.
  bool Adjacent(NodeId i, NodeId j) const;

  // Checked variants; out-of-range ids are an error.
  absl::StatusOr<bool> HasEdge(NodeId i, NodeId j) const;
  absl::StatusOr<std::size_t> Degree(NodeId v) const;

  std::size_t DegreeUnchecked(NodeId v) const { return offsets_[v + 1] - offsets_[v]; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<Edge> edges_;
};

struct LoadOptions {
  // Map arbitrary string tokens to dense ids in order of first appearance.
  bool relabel = false;
  // If set, the file is expected to describe exactly this many nodes; ids
  // beyond it (or a relabel map of a different size) are an error. Nodes
  // below the count that never appear become isolated nodes.
  std::optional<std::size_t> declared_num_nodes;
};

struct LoadedGraph {
  Graph graph;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
  // original_ids[dense_id]; empty unless relabeling was requested.
  std::vector<std::string> original_ids;
};

// Parses a whitespace-separated edge list. Lines starting with '#' and blank
// lines are skipped; tokens after the second on a line are ignored.
absl::StatusOr<LoadedGraph> LoadEdgeList(std::istream& in,
                                         const LoadOptions& options = {});
absl::StatusOr<LoadedGraph> LoadEdgeListFile(const std::string& path,
                                             const LoadOptions& options = {});

// Writes the canonical edge list, one "i j" pair per line.
void WriteEdgeList(const Graph& graph, std::ostream& out);

// Writes "original_id\tdense_id" lines.
absl::Status WriteRelabelMap(std::span<const std::string> original_ids,
                             const std::string& path);

}  // namespace dpgemb

#endif  // DPGEMB_GRAPH_H_
