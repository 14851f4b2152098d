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

// End-to-end compositions used by the command-line tool: a single ranking
// run, tax-rate sweeps, continuity probes and synthetic instances.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "taxrank/core.hpp"
#include "taxrank/metrics.hpp"
#include "taxrank/transport.hpp"
#include "taxrank/waterfill.hpp"

namespace taxrank::pipeline {

struct MetricsSummary {
  double ecn = 0.0;
  std::optional<double> ecpm;
  double gini = 0.0;
  // sum gamma_i w_{u,i} over selected pairs.
  double accuracy = 0.0;
  UtilityVector utilities;
};

// Metrics of realized lists.
MetricsSummary Evaluate(const ScoreMatrix& scores, const RankingLists& lists,
                        UtilityMode mode);
// Metrics of the expectation under marginals x.
MetricsSummary Evaluate(const ScoreMatrix& scores,
                        const RankingProbabilities& probs, UtilityMode mode);

struct StageTimings {
  double solve_seconds = 0.0;
  double project_seconds = 0.0;
  double sample_seconds = 0.0;
};

struct RankResult {
  waterfill::LowerBoundProblem problem;
  ExposureVector exposure;
  transport::Projection projection;
  std::optional<RankingLists> lists;
  MetricsSummary expected;
  std::optional<MetricsSummary> realized;
  StageTimings timings;
};

// build_problem -> solve -> project, then sample lists when `sample` is set.
RankResult Rank(const ScoreMatrix& scores, const RankingConfig& config,
                bool sample = true,
                const transport::SinkhornOptions& options = {});

struct SweepOptions {
  // Worker threads; 0 picks std::thread::hardware_concurrency().
  std::size_t jobs = 0;
  // Metrics on sampled lists instead of the marginals.
  bool realized = false;
  transport::SinkhornOptions sinkhorn;
};

struct SweepResult {
  std::vector<TradeoffPoint> points;
  // 1 - |U|^(-t/(1+t)) at each grid point.
  std::vector<double> pot_bound;
  // Lorenz curve of the gamma-weighted utilities at each grid point.
  std::vector<std::vector<metrics::LorenzPoint>> lorenz;
};

// t,ecn,ecpm,gini,pot,pot_bound
void SaveSweep(const SweepResult& sweep, const std::filesystem::path& path);
// t,population_share,utility_share in long format.
void SaveSweepLorenz(const SweepResult& sweep, const std::filesystem::path& path);

// One trade-off point per tax rate; POT is measured against a t = 0 run.
// The grid must be non-empty and ascending.
SweepResult Sweep(const ScoreMatrix& scores, const RankingConfig& base,
                  std::span<const double> t_grid, const SweepOptions& options = {});

struct ContinuityRow {
  double tax_rate = 0.0;
  double lambda = 0.0;
  double taxrank_ecn = 0.0;
  double taxrank_gini = 0.0;
  double taxrank_ecn_jump = 0.0;
  double taxrank_gini_jump = 0.0;
  double baseline_ecn = 0.0;
  double baseline_gini = 0.0;
  double baseline_ecn_jump = 0.0;
  double baseline_gini_jump = 0.0;
};

// lambda = t * |I| / (K * |U|): at that scale a unit of t taxes an item with
// the average per-item exposure by one unit of score.
double BaselineLambda(const ScoreMatrix& scores, std::size_t k, double tax_rate);

// For each t, |metric(t + delta) - metric(t)| for the taxed pipeline
// (expected utilities) and for the greedy popularity tax at the matched
// lambda (realized lists).
std::vector<ContinuityRow> Continuity(const ScoreMatrix& scores,
                                      const RankingConfig& base,
                                      std::span<const double> t_grid, double delta,
                                      const SweepOptions& options = {});

void SaveContinuity(std::span<const ContinuityRow> rows,
                    const std::filesystem::path& path);

// metric,expected,realized rows for ecn, ecpm, gini and accuracy.
void SaveSummary(const MetricsSummary& expected,
                 const std::optional<MetricsSummary>& realized,
                 const std::filesystem::path& path);

enum class SynthDistribution { kUniform, kPowerlaw };

SynthDistribution ParseSynthDistribution(std::string_view text);

// ctr-mode weights in [0, 1]. Uniform draws U[0, 1). Powerlaw gives item i
// base popularity 1 / (i + 1) times per-pair noise U[0.5, 1.5), clamped to 1.
ScoreMatrix Synthesize(std::size_t num_users, std::size_t num_items,
                       SynthDistribution distribution, std::uint64_t seed);

}  // namespace taxrank::pipeline
