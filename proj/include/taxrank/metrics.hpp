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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "taxrank/core.hpp"

namespace taxrank::metrics {

// Expected click (or exposure) number per user: sum(v) / |U|.
double Ecn(const UtilityVector& v, std::size_t num_users);

// Bid-weighted utility per user. Fails when bids are absent.
double Ecpm(const UtilityVector& v, const std::optional<std::vector<double>>& bids,
            std::size_t num_users);

// Gini index of s_i = gamma_i * v_i via the sorted identity
// sum_i (2i - n - 1) s_(i) / (n * sum s), i = 1..n ascending.
double Gini(const UtilityVector& v, std::span<const double> gamma);

struct LorenzPoint {
  double population_share;
  double utility_share;
};

// Ascending cumulative shares of gamma_i * v_i, from (0, 0) to (1, 1).
std::vector<LorenzPoint> LorenzPoints(const UtilityVector& v,
                                      std::span<const double> gamma);

// 1 - 2 * (trapezoid area under the Lorenz polygon); equals Gini exactly.
double GiniFromLorenz(std::span<const LorenzPoint> points);

// Relative accuracy lost against the untaxed run.
double PriceOfTaxation(double acc_at_zero, double acc_at_t);

// Reference curve 1 - |U|^(-t / (1 + t)) with unit constant.
double PotBound(std::size_t num_users, double tax_rate);

}  // namespace taxrank::metrics
