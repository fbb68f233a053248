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

#ifndef DPGEMB_IO_H_
#define DPGEMB_IO_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpgemb/dense_matrix.h"

namespace dpgemb {

enum class EmbeddingFormat { kText, kBinary };

// Text: header "num_nodes r", then one row of r decimals per node, printed
// with round-trip precision. Binary: 8-byte magic, u64 rows, u64 cols, then
// row-major little-endian doubles.
absl::Status WriteEmbedding(const DenseMatrix& matrix, const std::string& path,
                            EmbeddingFormat format);
// Detects the format from the magic bytes.
absl::StatusOr<DenseMatrix> ReadEmbedding(const std::string& path);

// Ordered "key=value" records. '#' starts a comment line.
using KeyValues = std::map<std::string, std::string, std::less<>>;

absl::StatusOr<KeyValues> ReadKeyValueFile(const std::string& path);
absl::Status WriteKeyValueFile(const KeyValues& values, const std::string& path);

// Lower-case hex SHA-256 of a file's bytes.
absl::StatusOr<std::string> Sha256File(const std::string& path);

// Appends rows to a CSV file, writing `header` first if the file is new or
// empty. Existing content is never rewritten.
absl::Status AppendCsv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows);

// Shortest decimal that round-trips the double.
std::string FormatDouble(double value);

}  // namespace dpgemb

#endif  // DPGEMB_IO_H_
