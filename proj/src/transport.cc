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

#include "taxrank/transport.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "taxrank/error.hpp"

namespace taxrank::transport {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kScaleMin = 1e-300;
constexpr double kScaleMax = 1e300;

// Scale s solving sum_j min(1, s * b_j) = target. b is scratch space.
double SolveLinearScale(std::span<double> b, double target) {
  double sum = 0.0;
  double max_b = 0.0;
  double min_positive = kInf;
  std::size_t positives = 0;
  for (double x : b) {
    sum += x;
    max_b = std::max(max_b, x);
    if (x > 0.0) {
      ++positives;
      min_positive = std::min(min_positive, x);
    }
  }
  if (positives == 0) return kInf;
  const double plain = target / sum;
  if (plain * max_b <= 1.0) return plain;
  if (target >= static_cast<double>(positives)) return 1.0 / min_positive;

  std::sort(b.begin(), b.end(), std::greater<>());
  std::vector<double> suffix(b.size() + 1, 0.0);
  for (std::size_t j = b.size(); j-- > 0;) suffix[j] = suffix[j + 1] + b[j];
  for (std::size_t r = 0; r < positives; ++r) {
    const double s = (target - static_cast<double>(r)) / suffix[r];
    if (s * b[r] <= 1.0) return s;
  }
  return 1.0 / min_positive;
}

double LinearMarginal(std::span<const double> b, double scale) {
  double total = 0.0;
  for (double x : b) total += std::min(1.0, scale * x);
  return total;
}

double LogAddExp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Log-space counterpart: log-scale l solving sum_j min(1, exp(l + s_j)) = target.
double SolveLogScale(std::span<double> s, double target) {
  double max_s = -kInf;
  double min_s = kInf;
  std::size_t finite = 0;
  for (double x : s) {
    if (x == -kInf) continue;
    max_s = std::max(max_s, x);
    min_s = std::min(min_s, x);
    ++finite;
  }
  if (finite == 0) return kInf;
  double sum = 0.0;
  for (double x : s) sum += std::exp(x - max_s);
  const double lse = max_s + std::log(sum);
  const double plain = std::log(target) - lse;
  if (plain + max_s <= 0.0) return plain;
  if (target >= static_cast<double>(finite)) return -min_s;

  std::sort(s.begin(), s.end(), std::greater<>());
  std::vector<double> suffix(s.size() + 1, -kInf);
  for (std::size_t j = s.size(); j-- > 0;) suffix[j] = LogAddExp(s[j], suffix[j + 1]);
  for (std::size_t r = 0; r < finite; ++r) {
    const double l = std::log(target - static_cast<double>(r)) - suffix[r];
    if (l + s[r] <= 0.0) return l;
  }
  return -min_s;
}

double LogMarginal(std::span<const double> s, double log_scale) {
  double total = 0.0;
  for (double x : s) total += std::exp(std::min(0.0, log_scale + x));
  return total;
}

// Kernel stored twice so row and column passes both stream contiguously.
// Holds exp((C - rowmax) / lambda) in linear mode and C / lambda in log mode.
struct Kernel {
  Matrix by_row;   // users x items
  Matrix by_col;   // items x users
  // rowmax / lambda, subtracted from the linear kernel rows.
  std::vector<double> row_shift;
};

Kernel BuildKernel(const ScoreMatrix& scores, double lambda, bool log_domain) {
  const std::size_t users = scores.num_users();
  const std::size_t items = scores.num_items();
  Kernel k{Matrix(users, items), Matrix(items, users),
           std::vector<double>(users, 0.0)};
  for (std::size_t u = 0; u < users; ++u) {
    double row_max = -kInf;
    for (std::size_t i = 0; i < items; ++i) {
      row_max = std::max(row_max, scores.score(u, i));
    }
    if (!log_domain) k.row_shift[u] = row_max / lambda;
    for (std::size_t i = 0; i < items; ++i) {
      const double c = scores.score(u, i);
      const double v = log_domain ? c / lambda : std::exp((c - row_max) / lambda);
      k.by_row(u, i) = v;
      k.by_col(i, u) = v;
    }
  }
  return k;
}

bool ScaleOutOfRange(double s) {
  return !std::isfinite(s) || s < kScaleMin || s > kScaleMax;
}

enum class RunOutcome { kDone, kNeedsLogDomain };

RunOutcome Run(const Kernel& kernel, double k, const std::vector<double>& col_target,
               const SinkhornOptions& options, bool log_domain,
               SinkhornState& state) {
  const std::size_t users = kernel.by_row.rows();
  const std::size_t items = kernel.by_row.cols();
  state.log_domain = log_domain;
  state.error_history.clear();
  state.converged = false;
  state.iterations_run = 0;

  // Initial scalings m = K 1, n = e (up to the per-user column scaling).
  state.m.assign(users, log_domain ? std::log(k) : k);
  state.n.resize(items);
  for (std::size_t i = 0; i < items; ++i) {
    const double e = col_target[i] / static_cast<double>(users);
    state.n[i] = log_domain ? std::log(e) : e;
  }

  std::vector<double> buffer(std::max(users, items));
  std::vector<double> next_m(users);
  for (int it = 0; it <= options.max_iterations; ++it) {
    double row_error = 0.0;
    for (std::size_t u = 0; u < users; ++u) {
      const auto krow = kernel.by_row.row(u);
      std::span<double> b(buffer.data(), items);
      for (std::size_t i = 0; i < items; ++i) {
        b[i] = log_domain ? krow[i] + state.n[i] : krow[i] * state.n[i];
      }
      const double current = log_domain ? LogMarginal(b, state.m[u])
                                        : LinearMarginal(b, state.m[u]);
      row_error += std::abs(current - k);
      next_m[u] = log_domain ? SolveLogScale(b, k) : SolveLinearScale(b, k);
    }
    state.error_history.push_back(row_error);
    if (row_error < options.tolerance) {
      state.converged = true;
      break;
    }
    if (it == options.max_iterations) break;
    // Less than a halving over the window: hand over to the Newton phase.
    const std::size_t w = static_cast<std::size_t>(options.stall_window);
    const auto& h = state.error_history;
    if (w > 0 && h.size() > w && row_error > 0.5 * h[h.size() - 1 - w]) break;

    state.m.swap(next_m);
    for (std::size_t i = 0; i < items; ++i) {
      const auto kcol = kernel.by_col.row(i);
      std::span<double> b(buffer.data(), users);
      for (std::size_t u = 0; u < users; ++u) {
        b[u] = log_domain ? kcol[u] + state.m[u] : kcol[u] * state.m[u];
      }
      state.n[i] = log_domain ? SolveLogScale(b, col_target[i])
                              : SolveLinearScale(b, col_target[i]);
    }
    state.iterations_run = it + 1;

    if (!log_domain) {
      for (double s : state.m) {
        if (ScaleOutOfRange(s)) return RunOutcome::kNeedsLogDomain;
      }
      for (double s : state.n) {
        if (ScaleOutOfRange(s)) return RunOutcome::kNeedsLogDomain;
      }
    } else {
      for (double s : state.m) {
        if (!std::isfinite(s)) {
          Fail(ErrorCode::kNumerical, "log-domain row scaling diverged");
        }
      }
    }
  }
  return RunOutcome::kDone;
}

struct RowSolve {
  std::vector<double> col_sum;
  double residual = 0.0;  // sum_i |col_sum_i - target_i|
  double merit = 0.0;     // sum_i (col_sum_i - target_i)^2
};

// Solves every row scale exactly for log column scalings n, writing m.
RowSolve SolveRows(const Matrix& log_kernel, double k, const std::vector<double>& n,
                   const std::vector<double>& col_target, std::vector<double>& m) {
  const std::size_t users = log_kernel.rows();
  const std::size_t items = log_kernel.cols();
  RowSolve out;
  out.col_sum.assign(items, 0.0);
  std::vector<double> b(items);
  for (std::size_t u = 0; u < users; ++u) {
    const auto krow = log_kernel.row(u);
    for (std::size_t i = 0; i < items; ++i) b[i] = krow[i] + n[i];
    m[u] = SolveLogScale(b, k);
    for (std::size_t i = 0; i < items; ++i) {
      out.col_sum[i] += std::exp(std::min(0.0, m[u] + krow[i] + n[i]));
    }
  }
  for (std::size_t i = 0; i < items; ++i) {
    const double f = out.col_sum[i] - col_target[i];
    out.residual += std::abs(f);
    out.merit += f * f;
  }
  return out;
}

// Damped Newton on the log column scalings with the row scalings eliminated:
// every row meets K exactly and the Jacobian of the column sums is
//   J = diag(c) - sum_u x_u x_u^T / r_u
// over uncapped entries, where c is the uncapped column mass and r_u the
// uncapped row mass. Plain alternation crawls once most of a row sits at the
// cap; this phase takes over when it stalls.
void NewtonRefine(const Matrix& log_kernel, double k,
                  const std::vector<double>& col_target,
                  const SinkhornOptions& options, SinkhornState& state) {
  const std::size_t users = log_kernel.rows();
  const std::size_t items = log_kernel.cols();
  // Columns with zero target stay at n = -inf.
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < items; ++i) {
    if (col_target[i] > 0.0) {
      active.push_back(i);
    } else {
      state.n[i] = -kInf;
    }
  }
  RowSolve current = SolveRows(log_kernel, k, state.n, col_target, state.m);
  std::vector<double> trial_n(items);
  std::vector<double> trial_m(users);
  std::vector<double> x(items);
  for (int step = 0;; ++step) {
    state.refine_history.push_back(current.residual);
    if (current.residual < options.tolerance) {
      state.converged = true;
      return;
    }
    if (step == options.max_newton_iterations || active.empty()) return;

    // Columns with no uncapped entry have no curvature; they stay put.
    const std::size_t dim = active.size();
    std::vector<double> mass(dim, 0.0);
    for (std::size_t u = 0; u < users; ++u) {
      const auto krow = log_kernel.row(u);
      for (std::size_t a = 0; a < dim; ++a) {
        const std::size_t i = active[a];
        const double z = state.m[u] + krow[i] + state.n[i];
        if (z < 0.0) mass[a] += std::exp(z);
      }
    }
    std::vector<std::size_t> free;
    for (std::size_t a = 0; a < dim; ++a) {
      if (mass[a] > 0.0) free.push_back(active[a]);
    }
    const std::size_t nf = free.size();
    if (nf == 0) return;

    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::VectorXd rhs(nf);
    for (std::size_t u = 0; u < users; ++u) {
      const auto krow = log_kernel.row(u);
      double r = 0.0;
      for (std::size_t i = 0; i < items; ++i) {
        const double z = state.m[u] + krow[i] + state.n[i];
        if (z < 0.0) r += std::exp(z);
      }
      if (!(r > 0.0)) continue;
      for (std::size_t a = 0; a < nf; ++a) {
        const double z = state.m[u] + krow[free[a]] + state.n[free[a]];
        x[a] = z < 0.0 ? std::exp(z) : 0.0;
      }
      for (std::size_t a = 0; a < nf; ++a) {
        if (x[a] == 0.0) continue;
        jac(a, a) += x[a];
        const double xa = x[a] / r;
        for (std::size_t b = 0; b <= a; ++b) jac(a, b) -= xa * x[b];
      }
    }
    double scale = 0.0;
    for (std::size_t a = 0; a < nf; ++a) {
      for (std::size_t b = 0; b < a; ++b) jac(b, a) = jac(a, b);
      scale = std::max(scale, jac(a, a));
      rhs(a) = col_target[free[a]] - current.col_sum[free[a]];
    }
    // J is singular along constant shifts of n (absorbed by m); a small
    // Levenberg term picks the minimum-norm step.
    jac.diagonal().array() += 1e-12 * scale;
    const Eigen::VectorXd delta = jac.ldlt().solve(rhs);
    if (!delta.allFinite()) return;

    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      trial_n = state.n;
      for (std::size_t a = 0; a < nf; ++a) trial_n[free[a]] += t * delta(a);
      RowSolve trial = SolveRows(log_kernel, k, trial_n, col_target, trial_m);
      if (trial.merit < (1.0 - 1e-4 * t) * current.merit) {
        state.n.swap(trial_n);
        state.m.swap(trial_m);
        current = std::move(trial);
        accepted = true;
        break;
      }
    }
    ++state.newton_steps;
    if (!accepted) {
      state.refine_history.push_back(current.residual);
      return;
    }
  }
}

std::string FormatResidual(double value) {
  std::ostringstream os;
  os.precision(6);
  os << value;
  return os.str();
}

}  // namespace

Projection Project(const ScoreMatrix& scores, const ExposureVector& e_star,
                   const RankingConfig& config, const SinkhornOptions& options) {
  config.Validate(scores);
  const std::size_t users = scores.num_users();
  const std::size_t items = scores.num_items();
  if (e_star.e.size() != items) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: exposure vector has " + std::to_string(e_star.e.size()) +
             " entries, scores have " + std::to_string(items) + " items");
  }
  const double k = static_cast<double>(config.k);
  for (double e : e_star.e) {
    if (!(e >= 0.0 && e <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument, "exposure entries must lie in [0, 1]");
    }
  }
  if (std::abs(e_star.sum() - k) > 1e-6) {
    Fail(ErrorCode::kInvalidArgument,
         "exposure vector sums to " + FormatResidual(e_star.sum()) +
             ", expected k = " + std::to_string(config.k));
  }
  if (options.max_iterations < 1) {
    Fail(ErrorCode::kInvalidArgument, "max_iterations must be positive");
  }

  std::vector<double> col_target(items);
  for (std::size_t i = 0; i < items; ++i) {
    col_target[i] = static_cast<double>(users) * e_star.e[i];
  }

  Projection out;
  SinkhornState& state = out.state;
  bool log_domain = options.force_log_domain;
  {
    Kernel kernel = BuildKernel(scores, config.lambda_ot, log_domain);
    if (Run(kernel, k, col_target, options, log_domain, state) ==
        RunOutcome::kNeedsLogDomain) {
      log_domain = true;
      state.warnings.push_back(
          "linear Sinkhorn scalings left [1e-300, 1e300]; restarted in log domain");
      kernel = BuildKernel(scores, config.lambda_ot, true);
      Run(kernel, k, col_target, options, true, state);
    }
    if (!state.converged && options.max_newton_iterations > 0) {
      if (!log_domain) {
        for (std::size_t u = 0; u < users; ++u) {
          state.m[u] = std::log(state.m[u]) - kernel.row_shift[u];
        }
        for (double& v : state.n) v = std::log(v);
        log_domain = true;
        kernel = BuildKernel(scores, config.lambda_ot, true);
        state.log_domain = true;
      }
      NewtonRefine(kernel.by_row, k, col_target, options, state);
    }

    Matrix x(users, items);
    for (std::size_t u = 0; u < users; ++u) {
      const auto krow = kernel.by_row.row(u);
      for (std::size_t i = 0; i < items; ++i) {
        double raw;
        if (log_domain) {
          const double exponent = state.m[u] + krow[i] + state.n[i];
          raw = exponent > 0.0 ? std::exp(std::min(exponent, 700.0)) : std::exp(exponent);
        } else {
          raw = state.m[u] * krow[i] * state.n[i];
        }
        if (raw >= 1.0) {
          ++state.capped_entries;
          state.clamped_mass += raw - 1.0;
        }
        x(u, i) = std::clamp(raw, 0.0, 1.0);
      }
    }
    out.probs.x = std::move(x);
  }

  const Matrix& x = out.probs.x;
  double row_error = 0.0;
  std::vector<double> col_sum(items, 0.0);
  for (std::size_t u = 0; u < users; ++u) {
    double row_sum = 0.0;
    const auto row = x.row(u);
    for (std::size_t i = 0; i < items; ++i) {
      row_sum += row[i];
      col_sum[i] += row[i];
    }
    row_error += std::abs(row_sum - k);
  }
  double column_error = 0.0;
  for (std::size_t i = 0; i < items; ++i) {
    column_error += std::abs(col_sum[i] - col_target[i]);
  }
  state.row_error = row_error;
  state.column_error = column_error;
  state.marginal_error = std::max(row_error, column_error);

  if (!state.converged) {
    if (state.marginal_error > options.failure_tolerance) {
      Fail(ErrorCode::kNumerical,
           "Sinkhorn did not converge after " +
               std::to_string(state.iterations_run) + " iterations and " +
               std::to_string(state.newton_steps) +
               " Newton steps; marginal residual " +
               FormatResidual(state.marginal_error));
    }
    state.warnings.push_back("Sinkhorn stopped unconverged with residual " +
                             FormatResidual(state.marginal_error));
  }
  return out;
}

double TransportCost(const RankingProbabilities& probs,
                     const ScoreMatrix& scores) {
  if (probs.x.rows() != scores.num_users() ||
      probs.x.cols() != scores.num_items()) {
    Fail(ErrorCode::kDimensionMismatch,
         "probabilities are " + std::to_string(probs.x.rows()) + "x" +
             std::to_string(probs.x.cols()) + ", scores are " +
             std::to_string(scores.num_users()) + "x" +
             std::to_string(scores.num_items()));
  }
  double total = 0.0;
  for (std::size_t u = 0; u < probs.x.rows(); ++u) {
    for (std::size_t i = 0; i < probs.x.cols(); ++i) {
      total += probs.x(u, i) * scores.score(u, i);
    }
  }
  return total;
}

double Entropy(const RankingProbabilities& probs) {
  double h = 0.0;
  for (double x : probs.x.data()) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

}  // namespace taxrank::transport
