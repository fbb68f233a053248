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

#include "dpgemb/io.h"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace dpgemb {
namespace {

constexpr std::array<char, 8> kEmbeddingMagic = {'D', 'P', 'G', 'E', 'E', 'M', 'B', '1'};

}  // namespace

std::string FormatDouble(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

absl::Status WriteEmbedding(const DenseMatrix& matrix, const std::string& path,
                            EmbeddingFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  if (format == EmbeddingFormat::kBinary) {
    out.write(kEmbeddingMagic.data(), kEmbeddingMagic.size());
    const std::uint64_t dims[2] = {matrix.rows(), matrix.cols()};
    out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    out.write(reinterpret_cast<const char*>(matrix.data().data()),
              static_cast<std::streamsize>(matrix.data().size() * sizeof(double)));
  } else {
    out << matrix.rows() << ' ' << matrix.cols() << '\n';
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      const auto row = matrix.row(r);
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c > 0) out << ' ';
        out << FormatDouble(row[c]);
      }
      out << '\n';
    }
  }
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

absl::StatusOr<DenseMatrix> ReadEmbedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open embedding ", path));
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in && magic == kEmbeddingMagic) {
    std::uint64_t dims[2] = {0, 0};
    if (!in.read(reinterpret_cast<char*>(dims), sizeof(dims))) {
      return absl::DataLossError(absl::StrCat("truncated embedding header in ", path));
    }
    DenseMatrix m(dims[0], dims[1]);
    if (!in.read(reinterpret_cast<char*>(m.data().data()),
                 static_cast<std::streamsize>(m.data().size() * sizeof(double)))) {
      return absl::DataLossError(absl::StrCat("truncated embedding ", path));
    }
    return m;
  }
  in.clear();
  in.seekg(0);
  std::size_t rows = 0, cols = 0;
  if (!(in >> rows >> cols)) {
    return absl::DataLossError(absl::StrCat(path, ": missing \"num_nodes r\" header"));
  }
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) {
    if (!(in >> v)) return absl::DataLossError(absl::StrCat(path, ": too few values"));
  }
  std::string extra;
  if (in >> extra) return absl::DataLossError(absl::StrCat(path, ": trailing data"));
  return m;
}

absl::StatusOr<KeyValues> ReadKeyValueFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  KeyValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view.front() == '#') continue;
    const auto eq = view.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": expected key=value"));
    }
    std::string key(absl::StripAsciiWhitespace(view.substr(0, eq)));
    if (key.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": empty key"));
    }
    values[key] = std::string(absl::StripAsciiWhitespace(view.substr(eq + 1)));
  }
  return values;
}

absl::Status WriteKeyValueFile(const KeyValues& values, const std::string& path) {
  std::ofstream out(path);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

absl::StatusOr<std::string> Sha256File(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    return absl::InternalError("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in.read(buf.data(), buf.size()) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xF]);
  }
  return hex;
}

absl::Status AppendCsv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot append to ", path));
  if (fresh) out << absl::StrJoin(header, ",") << '\n';
  for (const auto& row : rows) out << absl::StrJoin(row, ",") << '\n';
  return out ? absl::OkStatus() : absl::DataLossError(absl::StrCat("short write to ", path));
}

}  // namespace dpgemb
