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

#include "taxrank/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "taxrank/error.hpp"

namespace taxrank::waterfill {
namespace {

constexpr int kMaxBisections = 200;
constexpr double kSumTolerance = 1e-10;

void CheckProblem(const LowerBoundProblem& p) {
  const std::size_t n = p.a.size();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "no items");
  if (p.k < 1 || p.k > n) {
    Fail(ErrorCode::kInvalidArgument,
         "k must lie in [1, " + std::to_string(n) + "], got " +
             std::to_string(p.k));
  }
  if (!std::isfinite(p.tax_rate) || p.tax_rate < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "tax rate must be >= 0");
  }
  if (p.pinned.size() != n) {
    Fail(ErrorCode::kDimensionMismatch, "items axis: pinned flags mismatch");
  }
  bool any_positive = false;
  for (double a : p.a) {
    if (!std::isfinite(a) || a < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "coefficients must be finite and >= 0");
    }
    any_positive |= a > 0.0;
  }
  if (!any_positive) Fail(ErrorCode::kInvalidArgument, "degenerate problem");
}

// Linear objective: greedy fill from the floor, largest coefficient first,
// lowest index on ties. The K-th item absorbs the mass held by the floors.
ExposureVector SolveLinear(const LowerBoundProblem& p) {
  const std::size_t n = p.a.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return p.a[l] > p.a[r];
  });
  ExposureVector out{std::vector<double>(n, kFloor)};
  double remaining = static_cast<double>(p.k) - static_cast<double>(n) * kFloor;
  for (std::size_t idx = 0; idx < p.k; ++idx) {
    const double add = std::min(1.0 - kFloor, remaining);
    out.e[order[idx]] = idx + 1 < p.k ? 1.0 : kFloor + add;
    remaining -= add;
  }
  if (p.k == n) std::fill(out.e.begin(), out.e.end(), 1.0);
  return out;
}

// Fewer items carry score mass than list slots: every positive item saturates
// and the pinned ones split the rest evenly (they do not affect the objective).
ExposureVector SolveShortSupply(const LowerBoundProblem& p,
                                std::size_t positives) {
  const std::size_t n = p.a.size();
  const double share = (static_cast<double>(p.k) -
                        static_cast<double>(positives)) /
                       static_cast<double>(n - positives);
  ExposureVector out{std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) out.e[i] = p.a[i] > 0.0 ? 1.0 : share;
  return out;
}

struct Allocation {
  std::vector<double> e;
  double sum = 0.0;
};

// e_i(nu) with log_nu = log(nu); log-space so large t never overflows.
Allocation Allocate(const std::vector<double>& log_a, double log_nu, double t) {
  Allocation out{std::vector<double>(log_a.size(), kFloor)};
  const double log_floor = std::log(kFloor);
  for (std::size_t i = 0; i < log_a.size(); ++i) {
    if (std::isinf(log_a[i])) continue;
    const double exponent = (log_a[i] - log_nu) / t;
    double e;
    if (exponent >= 0.0) {
      e = 1.0;
    } else if (exponent <= log_floor) {
      e = kFloor;
    } else {
      e = std::exp(exponent);
    }
    out.e[i] = e;
  }
  for (double x : out.e) out.sum += x;
  return out;
}

ExposureVector SolvePower(const LowerBoundProblem& p) {
  const std::size_t n = p.a.size();
  const double t = p.tax_rate;
  const double k = static_cast<double>(p.k);

  std::vector<double> log_a(n);
  double min_log = std::numeric_limits<double>::infinity();
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    log_a[i] = p.a[i] > 0.0 ? std::log(p.a[i])
                            : -std::numeric_limits<double>::infinity();
    if (p.a[i] > 0.0) {
      min_log = std::min(min_log, log_a[i]);
      max_log = std::max(max_log, log_a[i]);
    }
  }

  // At lo every positive coordinate saturates, at hi every one is floored.
  double lo = min_log - 12.0 * std::log(10.0);
  double hi = max_log - t * std::log(kFloor);
  Allocation at_lo = Allocate(log_a, lo, t);
  Allocation at_hi = Allocate(log_a, hi, t);
  if (at_lo.sum < k - kSumTolerance || at_hi.sum > k + kSumTolerance) {
    Fail(ErrorCode::kInternal, "water-filling bisection failed to bracket");
  }

  Allocation best = at_lo;
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    Allocation at_mid = Allocate(log_a, mid, t);
    if (at_mid.sum > k) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(at_mid.sum - k) < std::abs(best.sum - k)) best = at_mid;
    if (std::abs(at_mid.sum - k) <= 1e-13 * k) break;
  }

  // Polish: keep the active set, then rescale the interior coordinates so the
  // budget holds to rounding. Interior values stay proportional to a^(1/t).
  double fixed = 0.0;
  double max_interior_log = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = best.e[i];
    if (e > kFloor && e < 1.0) {
      interior.push_back(i);
      max_interior_log = std::max(max_interior_log, log_a[i]);
    } else {
      fixed += e;
    }
  }
  if (!interior.empty()) {
    std::vector<double> z(interior.size());
    double z_sum = 0.0;
    for (std::size_t j = 0; j < interior.size(); ++j) {
      z[j] = std::exp((log_a[interior[j]] - max_interior_log) / t);
      z_sum += z[j];
    }
    const double scale = (k - fixed) / z_sum;
    bool inside = scale > 0.0;
    for (std::size_t j = 0; inside && j < interior.size(); ++j) {
      const double e = scale * z[j];
      inside = e >= kFloor && e <= 1.0;
    }
    if (inside) {
      for (std::size_t j = 0; j < interior.size(); ++j) {
        best.e[interior[j]] = scale * z[j];
      }
    }
  }
  return ExposureVector{std::move(best.e)};
}

}  // namespace

bool UsesLogBranch(double tax_rate) {
  return std::abs(tax_rate - 1.0) < kLogBranchWidth;
}

LowerBoundProblem MakeProblem(std::vector<double> a, std::size_t k,
                              double tax_rate) {
  LowerBoundProblem p;
  p.pinned.resize(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) p.pinned[i] = !(a[i] > 0.0);
  p.a = std::move(a);
  p.k = k;
  p.tax_rate = tax_rate;
  return p;
}

LowerBoundProblem BuildProblem(const ScoreMatrix& scores,
                               const RankingConfig& config) {
  config.Validate(scores);
  const double tau = 1.0 / static_cast<double>(scores.num_users());
  std::vector<double> column_mass(scores.num_items(), 0.0);
  for (std::size_t u = 0; u < scores.num_users(); ++u) {
    const auto row = scores.weights().row(u);
    for (std::size_t i = 0; i < row.size(); ++i) column_mass[i] += row[i];
  }
  std::vector<double> a(scores.num_items());
  bool any_positive = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = scores.gamma()[i] * tau * column_mass[i];
    any_positive |= a[i] > 0.0;
  }
  if (!any_positive) Fail(ErrorCode::kInvalidArgument, "degenerate problem");
  LowerBoundProblem p = MakeProblem(std::move(a), config.k, config.tax_rate);
  p.tau = tau;
  return p;
}

ExposureVector Solve(const LowerBoundProblem& problem) {
  CheckProblem(problem);
  if (problem.tax_rate == 0.0) return SolveLinear(problem);
  const auto positives = static_cast<std::size_t>(
      std::count_if(problem.a.begin(), problem.a.end(),
                    [](double a) { return a > 0.0; }));
  if (positives < problem.k) return SolveShortSupply(problem, positives);
  return SolvePower(problem);
}

double Objective(std::span<const double> a, std::span<const double> e,
                 double tax_rate) {
  if (a.size() != e.size()) {
    Fail(ErrorCode::kDimensionMismatch, "items axis: objective inputs differ");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    if (tax_rate == 0.0) {
      total += a[i] * e[i];
    } else if (UsesLogBranch(tax_rate)) {
      total += a[i] * std::log(e[i]);
    } else {
      total += a[i] * std::pow(e[i], 1.0 - tax_rate) / (1.0 - tax_rate);
    }
  }
  return total;
}

double KktResidual(std::span<const double> a, std::span<const double> e,
                   double tax_rate) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(e[i] > kFloor && e[i] < 1.0) || a[i] <= 0.0) continue;
    const double marginal = std::log(a[i]) - tax_rate * std::log(e[i]);
    lo = std::min(lo, marginal);
    hi = std::max(hi, marginal);
    ++count;
  }
  if (count < 2) return 0.0;
  return -std::expm1(lo - hi);
}

}  // namespace taxrank::waterfill
