// Copyright 2026 The Taxrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Fixed-size list sampling with prescribed inclusion probabilities.
//
// Each user's row of marginals (summing to K, entries in [0, 1]) is turned
// into K distinct items by Madow systematic sampling: items are laid out in a
// random order as consecutive intervals of length x_{u,i} on [0, K), and the
// points U, U + 1, ..., U + K - 1 for one uniform U pick the items whose
// intervals contain them. Item i is then included with probability exactly
// x_{u,i}, which sequential draws without replacement do not achieve.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taxrank/core.hpp"
#include "taxrank/random.hpp"

namespace taxrank::sampling {

// Row sums may deviate from K by at most this before sampling refuses.
inline constexpr double kRowSumTolerance = 1e-3;

// K distinct item indices in selection order (not ranked).
std::vector<std::size_t> SampleRow(std::span<const double> row, std::size_t k,
                                   Rng& rng);

// Lists ranked by descending gamma_i * w_{u,i}, ties to the lower index.
// User u draws from the stream (seed, u), so results do not depend on the
// order users are processed in.
RankingLists SampleLists(const RankingProbabilities& probs,
                         const ScoreMatrix& scores, std::size_t k,
                         std::uint64_t seed);

struct SamplingReport {
  std::size_t draws = 0;
  std::vector<double> mean_realized;
  std::vector<double> expected;
  // Standard error of mean_realized; zero for a single draw.
  std::vector<double> std_error;
  std::vector<double> z;
  double max_abs_z = 0.0;
};

// Mean realized utilities over `draws` independent list sets next to
// ExpectedUtilities. Draw d uses seed SplitMix64(seed + d).
SamplingReport ExpectedVsRealized(const RankingProbabilities& probs,
                                  const ScoreMatrix& scores, std::size_t k,
                                  UtilityMode mode, std::size_t draws,
                                  std::uint64_t seed);

}  // namespace taxrank::sampling
