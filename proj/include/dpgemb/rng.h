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

#ifndef DPGEMB_RNG_H_
#define DPGEMB_RNG_H_

#include <cstdint>
#include <random>

namespace dpgemb {

using Rng = std::mt19937_64;

// Independent named streams derived from one user seed.
enum class RngStream : std::uint32_t {
  kNegatives = 1,
  kBatch = 2,
  kNoise = 3,
  kInit = 4,
  kSplit = 5,
  kEvalPairs = 6,
};

// Engine for (seed, stream, index); distinct triples give unrelated streams.
inline Rng MakeRng(std::uint64_t seed, RngStream stream, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

}  // namespace dpgemb

#endif  // DPGEMB_RNG_H_
