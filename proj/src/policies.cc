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

#include "taxrank/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "taxrank/error.hpp"

namespace taxrank::policies {
namespace {

void CheckK(const ScoreMatrix& scores, std::size_t k) {
  if (k < 1 || k > scores.num_items()) {
    Fail(ErrorCode::kInvalidArgument,
         "k must lie in [1, " + std::to_string(scores.num_items()) + "], got " +
             std::to_string(k));
  }
}

// Writes the K best items of `values` into `out`, best first.
void SelectTop(const std::vector<double>& values, std::vector<std::size_t>& order,
               std::span<std::size_t> out) {
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + out.size(), order.end(),
                    [&](std::size_t l, std::size_t r) {
                      return values[l] != values[r] ? values[l] > values[r]
                                                    : l < r;
                    });
  std::copy(order.begin(), order.begin() + out.size(), out.begin());
}

}  // namespace

RankingLists TopK(const ScoreMatrix& scores, std::size_t k) {
  return TaxedTopK(scores, ItemTaxPolicy{std::vector<double>(scores.num_items(), 0.0)},
                   k);
}

RankingLists TaxedTopK(const ScoreMatrix& scores, const ItemTaxPolicy& policy,
                       std::size_t k) {
  CheckK(scores, k);
  const std::size_t items = scores.num_items();
  if (policy.mu.size() != items) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: mu has " + std::to_string(policy.mu.size()) +
             " entries, scores have " + std::to_string(items) + " items");
  }
  for (double m : policy.mu) {
    if (!std::isfinite(m)) Fail(ErrorCode::kInvalidArgument, "mu must be finite");
  }
  RankingLists lists(scores.num_users(), k);
  std::vector<double> s(items);
  std::vector<std::size_t> order(items);
  for (std::size_t u = 0; u < scores.num_users(); ++u) {
    for (std::size_t i = 0; i < items; ++i) s[i] = scores.score(u, i) + policy.mu[i];
    SelectTop(s, order, lists.list(u));
  }
  return lists;
}

RankingLists GreedyPopularityTax(const ScoreMatrix& scores, double lambda,
                                 std::size_t k, UtilityMode mode) {
  CheckK(scores, k);
  if (!std::isfinite(lambda) || lambda < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "lambda must be >= 0");
  }
  const std::size_t items = scores.num_items();
  RankingLists lists(scores.num_users(), k);
  std::vector<double> running(items, 0.0);
  std::vector<double> s(items);
  std::vector<std::size_t> order(items);
  for (std::size_t u = 0; u < scores.num_users(); ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      s[i] = scores.score(u, i) + (-lambda * running[i]);
    }
    SelectTop(s, order, lists.list(u));
    for (std::size_t item : lists.list(u)) {
      running[item] += scores.utility_weight(u, item, mode);
    }
  }
  return lists;
}

}  // namespace taxrank::policies
