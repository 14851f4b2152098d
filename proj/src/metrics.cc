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

#include "taxrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "taxrank/error.hpp"

namespace taxrank::metrics {
namespace {

std::vector<double> WeightedSorted(const UtilityVector& v,
                                   std::span<const double> gamma) {
  if (v.v.size() != gamma.size()) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: utilities have " + std::to_string(v.v.size()) +
             " entries, gamma has " + std::to_string(gamma.size()));
  }
  if (v.v.empty()) Fail(ErrorCode::kInvalidArgument, "Gini undefined");
  std::vector<double> s(v.v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = gamma[i] * v.v[i];
    total += s[i];
  }
  if (!(total > 0.0)) Fail(ErrorCode::kInvalidArgument, "Gini undefined");
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

double Ecn(const UtilityVector& v, std::size_t num_users) {
  if (num_users == 0) Fail(ErrorCode::kInvalidArgument, "num_users must be > 0");
  double total = 0.0;
  for (double x : v.v) total += x;
  return total / static_cast<double>(num_users);
}

double Ecpm(const UtilityVector& v, const std::optional<std::vector<double>>& bids,
            std::size_t num_users) {
  if (!bids) Fail(ErrorCode::kInvalidArgument, "bids required for eCPM");
  if (num_users == 0) Fail(ErrorCode::kInvalidArgument, "num_users must be > 0");
  if (bids->size() != v.v.size()) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: bids have " + std::to_string(bids->size()) +
             " entries, utilities have " + std::to_string(v.v.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < v.v.size(); ++i) total += (*bids)[i] * v.v[i];
  return total / static_cast<double>(num_users);
}

double Gini(const UtilityVector& v, std::span<const double> gamma) {
  const std::vector<double> s = WeightedSorted(v, gamma);
  const double n = static_cast<double>(s.size());
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    weighted += (2.0 * static_cast<double>(i + 1) - n - 1.0) * s[i];
    total += s[i];
  }
  return std::clamp(weighted / (n * total), 0.0, 1.0);
}

std::vector<LorenzPoint> LorenzPoints(const UtilityVector& v,
                                      std::span<const double> gamma) {
  const std::vector<double> s = WeightedSorted(v, gamma);
  double total = 0.0;
  for (double x : s) total += x;
  const double n = static_cast<double>(s.size());
  std::vector<LorenzPoint> points;
  points.reserve(s.size() + 1);
  points.push_back({0.0, 0.0});
  double running = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    running += s[i];
    points.push_back({static_cast<double>(i + 1) / n, running / total});
  }
  points.back() = {1.0, 1.0};
  return points;
}

double GiniFromLorenz(std::span<const LorenzPoint> points) {
  double area = 0.0;
  for (std::size_t j = 1; j < points.size(); ++j) {
    const double width = points[j].population_share - points[j - 1].population_share;
    area += 0.5 * width * (points[j].utility_share + points[j - 1].utility_share);
  }
  return 1.0 - 2.0 * area;
}

double PriceOfTaxation(double acc_at_zero, double acc_at_t) {
  if (!(acc_at_zero > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "baseline accuracy must be positive");
  }
  return (acc_at_zero - acc_at_t) / acc_at_zero;
}

double PotBound(std::size_t num_users, double tax_rate) {
  if (num_users < 1) Fail(ErrorCode::kInvalidArgument, "num_users must be >= 1");
  if (!(tax_rate >= 0.0)) Fail(ErrorCode::kInvalidArgument, "tax rate must be >= 0");
  const double users = static_cast<double>(num_users);
  if (std::isinf(tax_rate)) return 1.0 - 1.0 / users;
  return 1.0 - std::pow(users, -tax_rate / (1.0 + tax_rate));
}

}  // namespace taxrank::metrics
