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

#include "taxrank/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>

#include "taxrank/error.hpp"
#include "taxrank/io.hpp"
#include "taxrank/metrics.hpp"
#include "taxrank/policies.hpp"
#include "taxrank/random.hpp"
#include "taxrank/sampling.hpp"

namespace taxrank::pipeline {
namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

MetricsSummary Summarize(const ScoreMatrix& scores, const UtilityVector& v,
                         double accuracy) {
  MetricsSummary s;
  s.ecn = metrics::Ecn(v, scores.num_users());
  if (scores.bids()) s.ecpm = metrics::Ecpm(v, scores.bids(), scores.num_users());
  s.gini = metrics::Gini(v, scores.gamma());
  s.accuracy = accuracy;
  s.utilities = v;
  return s;
}

// Runs fn(0..count-1) on up to `jobs` threads. Each index writes only its own
// output slot, so results do not depend on scheduling.
void ParallelFor(std::size_t count, std::size_t jobs,
                 const std::function<void(std::size_t)>& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (std::size_t j = 0; j < count; ++j) fn(j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t j = next++; j < count; j = next++) {
        try {
          fn(j);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

void CheckGrid(std::span<const double> t_grid) {
  if (t_grid.empty()) Fail(ErrorCode::kInvalidArgument, "t grid must be non-empty");
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    if (!std::isfinite(t_grid[j]) || t_grid[j] < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "t grid values must be finite and >= 0");
    }
    if (j > 0 && t_grid[j] < t_grid[j - 1]) {
      Fail(ErrorCode::kInvalidArgument, "t grid must be ascending");
    }
  }
}

MetricsSummary PointMetrics(const ScoreMatrix& scores, RankingConfig config,
                            double tax_rate, const SweepOptions& options) {
  config.tax_rate = tax_rate;
  RankResult r = Rank(scores, config, options.realized, options.sinkhorn);
  return options.realized ? *r.realized : r.expected;
}

}  // namespace

MetricsSummary Evaluate(const ScoreMatrix& scores, const RankingLists& lists,
                        UtilityMode mode) {
  const UtilityVector v = ComputeUtilities(scores, lists, mode);
  double accuracy = 0.0;
  for (std::size_t u = 0; u < lists.num_users(); ++u) {
    for (std::size_t item : lists.list(u)) accuracy += scores.score(u, item);
  }
  return Summarize(scores, v, accuracy);
}

MetricsSummary Evaluate(const ScoreMatrix& scores,
                        const RankingProbabilities& probs, UtilityMode mode) {
  const UtilityVector v = ExpectedUtilities(scores, probs, mode);
  return Summarize(scores, v, transport::TransportCost(probs, scores));
}

RankResult Rank(const ScoreMatrix& scores, const RankingConfig& config,
                bool sample, const transport::SinkhornOptions& options) {
  config.Validate(scores);
  scores.ValidateFor(config.mode);
  RankResult r;

  auto start = Clock::now();
  r.problem = waterfill::BuildProblem(scores, config);
  r.exposure = waterfill::Solve(r.problem);
  r.timings.solve_seconds = Seconds(start);

  start = Clock::now();
  r.projection = transport::Project(scores, r.exposure, config, options);
  r.timings.project_seconds = Seconds(start);
  r.expected = Evaluate(scores, r.projection.probs, config.mode);

  if (sample) {
    start = Clock::now();
    r.lists = sampling::SampleLists(r.projection.probs, scores, config.k, config.seed);
    r.timings.sample_seconds = Seconds(start);
    r.realized = Evaluate(scores, *r.lists, config.mode);
  }
  return r;
}

SweepResult Sweep(const ScoreMatrix& scores, const RankingConfig& base,
                  std::span<const double> t_grid, const SweepOptions& options) {
  CheckGrid(t_grid);
  base.Validate(scores);

  // Slot 0 holds the t = 0 reference, slots 1.. the grid.
  std::vector<MetricsSummary> results(t_grid.size() + 1);
  ParallelFor(results.size(), options.jobs, [&](std::size_t j) {
    const double t = j == 0 ? 0.0 : t_grid[j - 1];
    results[j] = PointMetrics(scores, base, t, options);
  });

  SweepResult out;
  const double reference = results[0].accuracy;
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    const MetricsSummary& m = results[j + 1];
    TradeoffPoint p;
    p.tax_rate = t_grid[j];
    p.ecn = m.ecn;
    p.ecpm = m.ecpm;
    p.gini = m.gini;
    p.pot = metrics::PriceOfTaxation(reference, m.accuracy);
    out.points.push_back(p);
    out.pot_bound.push_back(metrics::PotBound(scores.num_users(), t_grid[j]));
    out.lorenz.push_back(metrics::LorenzPoints(m.utilities, scores.gamma()));
  }
  return out;
}

void SaveSweep(const SweepResult& sweep, const std::filesystem::path& path) {
  io::SaveTradeoff(sweep.points, path, std::span<const double>(sweep.pot_bound));
}

void SaveSweepLorenz(const SweepResult& sweep, const std::filesystem::path& path) {
  const std::vector<std::string> header{"t", "population_share", "utility_share"};
  std::vector<std::vector<std::string>> rows;
  for (std::size_t j = 0; j < sweep.lorenz.size(); ++j) {
    for (const auto& p : sweep.lorenz[j]) {
      rows.push_back({io::FormatNumber(sweep.points[j].tax_rate),
                      io::FormatNumber(p.population_share),
                      io::FormatNumber(p.utility_share)});
    }
  }
  io::SaveTable(path, header, rows);
}

double BaselineLambda(const ScoreMatrix& scores, std::size_t k, double tax_rate) {
  return tax_rate * static_cast<double>(scores.num_items()) /
         (static_cast<double>(k) * static_cast<double>(scores.num_users()));
}

std::vector<ContinuityRow> Continuity(const ScoreMatrix& scores,
                                      const RankingConfig& base,
                                      std::span<const double> t_grid, double delta,
                                      const SweepOptions& options) {
  CheckGrid(t_grid);
  if (!std::isfinite(delta) || delta < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "delta must be >= 0");
  }
  base.Validate(scores);

  std::vector<ContinuityRow> rows(t_grid.size());
  ParallelFor(rows.size(), options.jobs, [&](std::size_t j) {
    ContinuityRow& row = rows[j];
    const double t = t_grid[j];
    row.tax_rate = t;
    row.lambda = BaselineLambda(scores, base.k, t);

    const MetricsSummary at = PointMetrics(scores, base, t, options);
    const MetricsSummary next = PointMetrics(scores, base, t + delta, options);
    row.taxrank_ecn = at.ecn;
    row.taxrank_gini = at.gini;
    row.taxrank_ecn_jump = std::abs(next.ecn - at.ecn);
    row.taxrank_gini_jump = std::abs(next.gini - at.gini);

    const MetricsSummary b_at = Evaluate(
        scores, policies::GreedyPopularityTax(scores, row.lambda, base.k, base.mode),
        base.mode);
    const MetricsSummary b_next = Evaluate(
        scores,
        policies::GreedyPopularityTax(scores, BaselineLambda(scores, base.k, t + delta),
                                      base.k, base.mode),
        base.mode);
    row.baseline_ecn = b_at.ecn;
    row.baseline_gini = b_at.gini;
    row.baseline_ecn_jump = std::abs(b_next.ecn - b_at.ecn);
    row.baseline_gini_jump = std::abs(b_next.gini - b_at.gini);
  });
  return rows;
}

void SaveContinuity(std::span<const ContinuityRow> rows,
                    const std::filesystem::path& path) {
  const std::vector<std::string> header{
      "t",          "lambda",           "taxrank_ecn",       "taxrank_gini",
      "taxrank_ecn_jump", "taxrank_gini_jump", "baseline_ecn", "baseline_gini",
      "baseline_ecn_jump", "baseline_gini_jump"};
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    table.push_back({io::FormatNumber(r.tax_rate), io::FormatNumber(r.lambda),
                     io::FormatNumber(r.taxrank_ecn), io::FormatNumber(r.taxrank_gini),
                     io::FormatNumber(r.taxrank_ecn_jump),
                     io::FormatNumber(r.taxrank_gini_jump),
                     io::FormatNumber(r.baseline_ecn), io::FormatNumber(r.baseline_gini),
                     io::FormatNumber(r.baseline_ecn_jump),
                     io::FormatNumber(r.baseline_gini_jump)});
  }
  io::SaveTable(path, header, table);
}

void SaveSummary(const MetricsSummary& expected,
                 const std::optional<MetricsSummary>& realized,
                 const std::filesystem::path& path) {
  const std::vector<std::string> header{"metric", "expected", "realized"};
  auto cell = [](std::optional<double> v) {
    return v ? io::FormatNumber(*v) : std::string();
  };
  auto row = [&](const char* name, auto field) {
    std::optional<double> r;
    if (realized) r = field(*realized);
    return std::vector<std::string>{name, cell(field(expected)), cell(r)};
  };
  std::vector<std::vector<std::string>> rows;
  rows.push_back(row("ecn", [](const MetricsSummary& m) { return std::optional(m.ecn); }));
  if (expected.ecpm) {
    rows.push_back(row("ecpm", [](const MetricsSummary& m) { return m.ecpm; }));
  }
  rows.push_back(row("gini", [](const MetricsSummary& m) { return std::optional(m.gini); }));
  rows.push_back(
      row("accuracy", [](const MetricsSummary& m) { return std::optional(m.accuracy); }));
  io::SaveTable(path, header, rows);
}

SynthDistribution ParseSynthDistribution(std::string_view text) {
  if (text == "uniform") return SynthDistribution::kUniform;
  if (text == "powerlaw") return SynthDistribution::kPowerlaw;
  Fail(ErrorCode::kInvalidArgument,
       "unknown distribution '" + std::string(text) + "' (expected uniform or powerlaw)");
}

ScoreMatrix Synthesize(std::size_t num_users, std::size_t num_items,
                       SynthDistribution distribution, std::uint64_t seed) {
  if (num_users < 1 || num_items < 1) {
    Fail(ErrorCode::kInvalidArgument, "synthetic sizes must be >= 1");
  }
  Rng rng(seed);
  Matrix w(num_users, num_items);
  for (std::size_t u = 0; u < num_users; ++u) {
    for (std::size_t i = 0; i < num_items; ++i) {
      const double draw = rng.Uniform();
      if (distribution == SynthDistribution::kUniform) {
        w(u, i) = draw;
      } else {
        const double base = 1.0 / static_cast<double>(i + 1);
        w(u, i) = std::min(1.0, base * (0.5 + draw));
      }
    }
  }
  return ScoreMatrix::Create(std::move(w));
}

}  // namespace taxrank::pipeline
