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

// Entropic optimal-transport projection of an exposure vector onto per-user
// ranking probabilities.
//
// Solves
//
//   max_x <x, C> - lambda * sum x log x
//   s.t.  row sums = K,  column sums = |U| * e,  0 <= x <= 1
//
// with C_{u,i} = gamma_i * w_{u,i}. Stationarity gives
// x = min(1, diag(m) B diag(n)) with B = exp(C / lambda), so the solver
// alternates exact row and column rescalings. When no entry reaches the cap
// each rescaling is the plain Sinkhorn update m = K / (B n),
// n = |U| e / (B^T m); otherwise the scale solves the capped 1-D equation
// sum_j min(1, s * b_j) = target exactly.
//
// The linear recursion switches to log-domain updates if a scaling factor
// leaves [1e-300, 1e300].

#pragma once

#include <string>
#include <vector>

#include "taxrank/core.hpp"

namespace taxrank::transport {

struct SinkhornOptions {
  int max_iterations = 1000;
  // L1 error per marginal below which the run counts as converged.
  double tolerance = 1e-6;
  // Unconverged runs above this residual are reported as failures.
  double failure_tolerance = 1e-3;
  bool force_log_domain = false;
  // Sinkhorn hands over to Newton steps on the column scalings when the row
  // error fails to halve within this many iterations (0 disables the check),
  // or when max_iterations runs out.
  int stall_window = 20;
  // 0 disables the Newton phase.
  int max_newton_iterations = 100;
};

struct SinkhornState {
  // Row and column scalings; natural logs of them when log_domain is set.
  std::vector<double> m;
  std::vector<double> n;
  bool log_domain = false;
  int iterations_run = 0;
  bool converged = false;
  // max(row L1 error, column L1 error) of the returned matrix.
  double marginal_error = 0.0;
  double row_error = 0.0;
  double column_error = 0.0;
  // Row L1 error observed at the start of each Sinkhorn iteration.
  std::vector<double> error_history;
  int newton_steps = 0;
  // Column L1 error before each Newton step; rows are exact in that phase.
  std::vector<double> refine_history;
  // Mass above 1 that the uncapped form m_u B_ui n_i would have carried on
  // capped entries. Marginals already account for the cap.
  double clamped_mass = 0.0;
  std::size_t capped_entries = 0;
  std::vector<std::string> warnings;
};

struct Projection {
  RankingProbabilities probs;
  SinkhornState state;
};

Projection Project(const ScoreMatrix& scores, const ExposureVector& e_star,
                   const RankingConfig& config,
                   const SinkhornOptions& options = {});

// <x, C> = sum x_{u,i} gamma_i w_{u,i}.
double TransportCost(const RankingProbabilities& probs,
                     const ScoreMatrix& scores);

// Shannon entropy -sum x log x with 0 log 0 = 0.
double Entropy(const RankingProbabilities& probs);

}  // namespace taxrank::transport
