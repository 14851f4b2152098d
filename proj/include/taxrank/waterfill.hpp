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

// Exposure allocation under the alpha-fair welfare objective.
//
// Solves
//
//   max_e  sum_i a_i * g(e_i; t)   s.t.  sum_i e_i = K,  eps <= e_i <= 1
//
// with g(e; t) = e^(1-t) / (1-t) for t != 1 and g(e; 1) = log(e). The
// objective is separable and concave, so the optimum equalizes the marginal
// value a_i * e_i^(-t) across all coordinates strictly inside the box. Each
// coordinate is therefore clamp((a_i / nu)^(1/t), eps, 1) for a common
// multiplier nu, found by bisection on log(nu).
//
// t = 0 is linear: the optimum fills the K largest coefficients.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "taxrank/core.hpp"

namespace taxrank::waterfill {

// Lower bound on every coordinate; stands in for the open constraint e > 0.
inline constexpr double kFloor = 1e-9;

struct LowerBoundProblem {
  // a_i = gamma_i * tau * sum_u w_{u,i}
  std::vector<double> a;
  std::size_t k = 1;
  double tax_rate = 0.0;
  double tau = 1.0;
  // Items with no score mass; held at the floor unless capacity runs short.
  std::vector<bool> pinned;
};

// Uses tau = 1 / |U| so coefficients are average per-user weights.
LowerBoundProblem BuildProblem(const ScoreMatrix& scores,
                               const RankingConfig& config);

// Problem over raw coefficients, mostly for tests and the C API.
LowerBoundProblem MakeProblem(std::vector<double> a, std::size_t k,
                              double tax_rate);

ExposureVector Solve(const LowerBoundProblem& problem);

// |t - 1| below this threshold selects the logarithmic branch.
inline constexpr double kLogBranchWidth = 1e-9;
bool UsesLogBranch(double tax_rate);

// sum_i a_i * g(e_i; t); coordinates with a_i = 0 contribute nothing.
double Objective(std::span<const double> a, std::span<const double> e,
                 double tax_rate);

// Relative spread 1 - min/max of the marginal values a_i * e_i^(-t) over
// coordinates strictly inside (eps, 1). Zero when fewer than two are interior.
double KktResidual(std::span<const double> a, std::span<const double> e,
                   double tax_rate);

}  // namespace taxrank::waterfill
