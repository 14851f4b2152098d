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

#include "taxrank/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "taxrank/error.hpp"

namespace taxrank::sampling {

std::vector<std::size_t> SampleRow(std::span<const double> row, std::size_t k,
                                   Rng& rng) {
  const std::size_t n = row.size();
  if (k < 1 || k > n) {
    Fail(ErrorCode::kInvalidArgument, "k must lie in [1, row length]");
  }
  double total = 0.0;
  for (double x : row) {
    if (!(x >= -1e-9 && x <= 1.0 + 1e-9)) {
      Fail(ErrorCode::kInvalidArgument,
           "infeasible marginals: entry outside [0, 1]");
    }
    total += x;
  }
  const double target = static_cast<double>(k);
  if (std::abs(total - target) > kRowSumTolerance) {
    Fail(ErrorCode::kInvalidArgument, "infeasible marginals");
  }

  const double scale = target / total;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.Shuffle(std::span<std::size_t>(order));
  const double u = rng.Uniform();

  std::vector<std::size_t> picked;
  picked.reserve(k);
  std::vector<char> taken(n, 0);
  double cumulative = 0.0;
  double point = u;
  for (std::size_t j = 0; j < n && picked.size() < k; ++j) {
    const std::size_t item = order[j];
    const double p = std::clamp(row[item] * scale, 0.0, 1.0);
    const double upper = j + 1 == n ? target : cumulative + p;
    if (point < upper) {
      picked.push_back(item);
      taken[item] = 1;
      point = u + static_cast<double>(picked.size());
    }
    cumulative = upper;
  }
  // Only reachable through rounding in the cumulative sums.
  if (picked.size() < k) {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) rest.push_back(i);
    }
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t l, std::size_t r) {
      return row[l] > row[r];
    });
    for (std::size_t i = 0; picked.size() < k; ++i) picked.push_back(rest[i]);
  }
  return picked;
}

RankingLists SampleLists(const RankingProbabilities& probs,
                         const ScoreMatrix& scores, std::size_t k,
                         std::uint64_t seed) {
  if (probs.x.rows() != scores.num_users() ||
      probs.x.cols() != scores.num_items()) {
    Fail(ErrorCode::kDimensionMismatch,
         "probabilities are " + std::to_string(probs.x.rows()) + "x" +
             std::to_string(probs.x.cols()) + ", scores are " +
             std::to_string(scores.num_users()) + "x" +
             std::to_string(scores.num_items()));
  }
  RankingLists lists(probs.x.rows(), k);
  for (std::size_t u = 0; u < probs.x.rows(); ++u) {
    Rng rng(seed, u);
    std::vector<std::size_t> picked = SampleRow(probs.x.row(u), k, rng);
    std::sort(picked.begin(), picked.end(), [&](std::size_t l, std::size_t r) {
      const double sl = scores.score(u, l);
      const double sr = scores.score(u, r);
      return sl != sr ? sl > sr : l < r;
    });
    std::copy(picked.begin(), picked.end(), lists.list(u).begin());
  }
  return lists;
}

SamplingReport ExpectedVsRealized(const RankingProbabilities& probs,
                                  const ScoreMatrix& scores, std::size_t k,
                                  UtilityMode mode, std::size_t draws,
                                  std::uint64_t seed) {
  if (draws < 1) Fail(ErrorCode::kInvalidArgument, "draws must be >= 1");
  const std::size_t items = scores.num_items();
  SamplingReport report;
  report.draws = draws;
  report.expected = ExpectedUtilities(scores, probs, mode).v;

  // Welford accumulation per item.
  std::vector<double> mean(items, 0.0);
  std::vector<double> m2(items, 0.0);
  for (std::size_t d = 0; d < draws; ++d) {
    const RankingLists lists = SampleLists(probs, scores, k, SplitMix64(seed + d));
    const UtilityVector v = ComputeUtilities(scores, lists, mode);
    const double count = static_cast<double>(d + 1);
    for (std::size_t i = 0; i < items; ++i) {
      const double delta = v.v[i] - mean[i];
      mean[i] += delta / count;
      m2[i] += delta * (v.v[i] - mean[i]);
    }
  }

  report.mean_realized = mean;
  report.std_error.assign(items, 0.0);
  report.z.assign(items, 0.0);
  const double n = static_cast<double>(draws);
  for (std::size_t i = 0; i < items; ++i) {
    const double diff = mean[i] - report.expected[i];
    if (draws > 1) {
      report.std_error[i] = std::sqrt(m2[i] / (n - 1.0) / n);
    }
    if (report.std_error[i] > 0.0) {
      report.z[i] = diff / report.std_error[i];
    } else if (draws > 1 && std::abs(diff) > 1e-9 * std::max(1.0, std::abs(report.expected[i]))) {
      report.z[i] = std::copysign(INFINITY, diff);
    }
    report.max_abs_z = std::max(report.max_abs_z, std::abs(report.z[i]));
  }
  return report;
}

}  // namespace taxrank::sampling
