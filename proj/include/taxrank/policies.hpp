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

// Baseline policies: accuracy-first top-K and item-level additive taxes.
//
// An item-level tax policy ranks user u's items by
// s_{u,i} = gamma_i * w_{u,i} + mu_i and keeps the K best. Every selection is
// lexicographic on (score descending, index ascending).

#pragma once

#include <cstddef>
#include <vector>

#include "taxrank/core.hpp"

namespace taxrank::policies {

struct ItemTaxPolicy {
  std::vector<double> mu;
  double lambda = 0.0;
};

RankingLists TopK(const ScoreMatrix& scores, std::size_t k);

RankingLists TaxedTopK(const ScoreMatrix& scores, const ItemTaxPolicy& policy,
                       std::size_t k);

// Users are served in ascending index order. Before each user the tax is
// mu_i = -lambda * v_i, where v is the utility accumulated by the users
// already served (mode decides whether a selection adds 1 or w_{u,i}).
RankingLists GreedyPopularityTax(const ScoreMatrix& scores, double lambda,
                                 std::size_t k, UtilityMode mode);

}  // namespace taxrank::policies
