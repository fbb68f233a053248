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

#include "dpgemb/proximity.h"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dpgemb {

std::string_view ProximityKindName(ProximityKind kind) {
  switch (kind) {
    case ProximityKind::kDegree:
      return "degree";
    case ProximityKind::kDeepWalk:
      return "deepwalk";
  }
  return "unknown";
}

absl::StatusOr<ProximityKind> ParseProximityKind(std::string_view name) {
  if (name == "degree" || name == "deg") return ProximityKind::kDegree;
  if (name == "deepwalk" || name == "dw") return ProximityKind::kDeepWalk;
  return absl::InvalidArgumentError(absl::StrCat("unknown proximity kind '", std::string(name), "'"));
}

absl::StatusOr<ProximityMatrix> ProximityMatrix::FromValues(DenseMatrix values,
                                                            ProximityKind kind,
                                                            std::size_t window) {
  const std::size_t n = values.rows();
  if (values.cols() != n) {
    return absl::InvalidArgumentError("proximity matrix must be square");
  }
  ProximityMatrix p;
  p.row_sums_.assign(n, 0.0);
  p.min_positive_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    values(i, i) = 0.0;
    double sum = 0.0;
    for (double v : values.row(i)) {
      if (!std::isfinite(v) || v < 0.0) {
        return absl::InvalidArgumentError(
            absl::StrCat("proximity row ", i, " holds invalid entry ", v));
      }
      sum += v;
      if (v > 0.0 && v < p.min_positive_) p.min_positive_ = v;
    }
    p.row_sums_[i] = sum;
  }
  if (!std::isfinite(p.min_positive_)) {
    return absl::FailedPreconditionError(
        "proximity matrix has no positive entry; min(P) is undefined");
  }
  p.values_ = std::move(values);
  p.kind_ = kind;
  p.window_ = window;
  return p;
}

ProximityMatrix ProximityMatrix::Scaled(double factor) const {
  ProximityMatrix p = *this;
  for (double& v : p.values_.data()) v *= factor;
  p.min_positive_ = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.num_nodes(); ++i) {
    double sum = 0.0;
    for (double v : p.values_.row(i)) {
      sum += v;
      if (v > 0.0 && v < p.min_positive_) p.min_positive_ = v;
    }
    p.row_sums_[i] = sum;
  }
  return p;
}

absl::StatusOr<ProximityMatrix> DegreeProximity(const Graph& graph) {
  const std::size_t n = graph.num_nodes();
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError("degree proximity needs at least one edge");
  }
  DenseMatrix values(n, n);
  for (NodeId i = 0; i < n; ++i) {
    const double di = static_cast<double>(graph.DegreeUnchecked(i));
    for (NodeId j = 0; j < n; ++j) {
      if (i != j) values(i, j) = di * static_cast<double>(graph.DegreeUnchecked(j));
    }
  }
  return ProximityMatrix::FromValues(std::move(values), ProximityKind::kDegree);
}

absl::StatusOr<ProximityMatrix> DeepWalkProximity(const Graph& graph, std::size_t window) {
  if (window == 0) return absl::InvalidArgumentError("DeepWalk window must be >= 1");
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError("DeepWalk proximity needs at least one edge");
  }
  const std::size_t n = graph.num_nodes();
  DenseMatrix values(n, n);
  std::vector<double> walk(n), next(n);
  const double inv_t = 1.0 / static_cast<double>(window);
  for (NodeId i = 0; i < n; ++i) {
    if (graph.DegreeUnchecked(i) == 0) continue;
    // Row i of (D^-1 A)^t is e_i^T (D^-1 A)^t; push the distribution forward.
    std::fill(walk.begin(), walk.end(), 0.0);
    walk[i] = 1.0;
    auto row = values.row(i);
    for (std::size_t t = 0; t < window; ++t) {
      std::fill(next.begin(), next.end(), 0.0);
      for (NodeId u = 0; u < n; ++u) {
        if (walk[u] == 0.0) continue;
        const auto nbrs = graph.Neighbors(u);
        const double share = walk[u] / static_cast<double>(nbrs.size());
        for (NodeId v : nbrs) next[v] += share;
      }
      walk.swap(next);
      for (std::size_t j = 0; j < n; ++j) row[j] += walk[j];
    }
    for (double& v : row) v *= inv_t;
  }
  return ProximityMatrix::FromValues(std::move(values), ProximityKind::kDeepWalk, window);
}

absl::StatusOr<double> NegativeWeight(const ProximityMatrix& proximity, NodeId center) {
  if (center >= proximity.num_nodes()) {
    return absl::OutOfRangeError(absl::StrCat("node ", center, " out of range"));
  }
  const double sum = proximity.row_sum(center);
  if (sum <= 0.0) {
    return absl::FailedPreconditionError(
        absl::StrCat("node ", center, " has zero proximity row sum"));
  }
  return static_cast<double>(proximity.num_nodes()) * proximity.min_positive() / sum;
}

std::vector<double> NegativeWeights(const ProximityMatrix& proximity) {
  std::vector<double> w(proximity.num_nodes(), 0.0);
  const double scale = static_cast<double>(proximity.num_nodes()) * proximity.min_positive();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (proximity.row_sum(i) > 0.0) w[i] = scale / proximity.row_sum(i);
  }
  return w;
}

std::vector<NodeId> SamplingMassViolations(const ProximityMatrix& proximity) {
  std::vector<NodeId> bad;
  for (NodeId i = 0; i < proximity.num_nodes(); ++i) {
    const double sum = proximity.row_sum(i);
    if (sum <= 0.0 || proximity.min_positive() / sum >= 1.0) bad.push_back(i);
  }
  return bad;
}

namespace {

constexpr std::array<char, 8> kProximityMagic = {'D', 'P', 'G', 'E', 'P', 'R', 'X', '1'};

template <typename T>
void WritePod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool ReadPod(std::istream& in, T& value) {
  return static_cast<bool>(in.read(reinterpret_cast<char*>(&value), sizeof(T)));
}

}  // namespace

absl::Status WriteProximityCache(const ProximityMatrix& proximity, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(kProximityMagic.data(), kProximityMagic.size());
  WritePod(out, static_cast<std::uint64_t>(proximity.num_nodes()));
  WritePod(out, static_cast<std::uint32_t>(proximity.kind()));
  WritePod(out, static_cast<std::uint64_t>(proximity.window()));
  const auto data = proximity.values().data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

absl::StatusOr<ProximityMatrix> ReadProximityCache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open proximity cache ", path));
  std::array<char, 8> magic{};
  std::uint64_t n = 0, window = 0;
  std::uint32_t kind = 0;
  if (!in.read(magic.data(), magic.size()) || magic != kProximityMagic) {
    return absl::DataLossError(absl::StrCat(path, " is not a proximity cache"));
  }
  if (!ReadPod(in, n) || !ReadPod(in, kind) || !ReadPod(in, window) || kind > 1) {
    return absl::DataLossError(absl::StrCat("corrupt proximity cache header in ", path));
  }
  DenseMatrix values(n, n);
  auto data = values.data();
  if (!in.read(reinterpret_cast<char*>(data.data()),
               static_cast<std::streamsize>(data.size() * sizeof(double)))) {
    return absl::DataLossError(absl::StrCat("truncated proximity cache ", path));
  }
  return ProximityMatrix::FromValues(std::move(values), static_cast<ProximityKind>(kind),
                                     window);
}

}  // namespace dpgemb
