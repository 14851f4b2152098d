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

#include "taxrank/taxrank.h"

#include <algorithm>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "taxrank/core.hpp"
#include "taxrank/error.hpp"
#include "taxrank/io.hpp"
#include "taxrank/metrics.hpp"
#include "taxrank/pipeline.hpp"
#include "taxrank/waterfill.hpp"

struct taxrank_scores {
  taxrank::io::ScoreData data;
};

struct taxrank_result {
  taxrank::pipeline::RankResult result;
};

struct taxrank_lists {
  taxrank::RankingLists lists;
};

struct taxrank_sweep {
  taxrank::pipeline::SweepResult sweep;
};

struct taxrank_continuity {
  std::vector<taxrank::pipeline::ContinuityRow> rows;
};

namespace {

using taxrank::ErrorCode;

thread_local std::string last_error;

taxrank_status ToStatus(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return TAXRANK_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDimensionMismatch: return TAXRANK_ERR_DIMENSION;
    case ErrorCode::kNumerical: return TAXRANK_ERR_NUMERICAL;
    case ErrorCode::kIo: return TAXRANK_ERR_IO;
    case ErrorCode::kInternal: return TAXRANK_ERR_INTERNAL;
  }
  return TAXRANK_ERR_INTERNAL;
}

taxrank_status Record(taxrank_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs fn and converts any exception into a status plus thread-local message.
template <typename Fn>
taxrank_status Guard(Fn&& fn) {
  try {
    fn();
    return TAXRANK_OK;
  } catch (const taxrank::Error& e) {
    return Record(ToStatus(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Record(TAXRANK_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Record(TAXRANK_ERR_INTERNAL, e.what());
  } catch (...) {
    return Record(TAXRANK_ERR_INTERNAL, "unknown error");
  }
}

void Require(bool ok, const char* what) {
  if (!ok) taxrank::Fail(ErrorCode::kInvalidArgument, what);
}

void RequireLength(std::size_t have, std::size_t need) {
  if (have < need) {
    taxrank::Fail(ErrorCode::kDimensionMismatch,
                  "output buffer holds " + std::to_string(have) + " entries, need " +
                      std::to_string(need));
  }
}

taxrank::UtilityMode ToMode(taxrank_mode mode) {
  switch (mode) {
    case TAXRANK_MODE_EXPOSURE: return taxrank::UtilityMode::kExposure;
    case TAXRANK_MODE_CTR: return taxrank::UtilityMode::kCtr;
  }
  taxrank::Fail(ErrorCode::kInvalidArgument, "unknown utility mode");
}

taxrank::RankingConfig ToConfig(const taxrank_config* config) {
  Require(config != nullptr, "config is null");
  taxrank::RankingConfig c;
  c.k = config->k;
  c.tax_rate = config->tax_rate;
  c.lambda_ot = config->lambda_ot;
  c.seed = config->seed;
  c.mode = ToMode(config->mode);
  return c;
}

taxrank::pipeline::SweepOptions ToSweepOptions(const taxrank_config* config) {
  taxrank::pipeline::SweepOptions o;
  o.jobs = config->jobs;
  o.realized = config->realized != 0;
  return o;
}

void Fill(const taxrank::pipeline::MetricsSummary& m, taxrank_metrics* out) {
  out->ecn = m.ecn;
  out->has_ecpm = m.ecpm.has_value();
  out->ecpm = m.ecpm.value_or(0.0);
  out->gini = m.gini;
  out->accuracy = m.accuracy;
}

}  // namespace

extern "C" {

void taxrank_config_init(taxrank_config* config) {
  if (config == nullptr) return;
  const taxrank::RankingConfig d;
  config->k = d.k;
  config->tax_rate = d.tax_rate;
  config->lambda_ot = d.lambda_ot;
  config->seed = d.seed;
  config->mode = TAXRANK_MODE_CTR;
  config->jobs = 0;
  config->realized = 0;
}

const char* taxrank_last_error(void) { return last_error.c_str(); }

const char* taxrank_status_string(taxrank_status status) {
  switch (status) {
    case TAXRANK_OK: return "ok";
    case TAXRANK_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TAXRANK_ERR_DIMENSION: return "dimension mismatch";
    case TAXRANK_ERR_NUMERICAL: return "numerical failure";
    case TAXRANK_ERR_IO: return "i/o error";
    case TAXRANK_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* taxrank_version(void) { return "0.1.0"; }

taxrank_status taxrank_scores_create(const double* weights, size_t num_users,
                                     size_t num_items, const double* gamma,
                                     const double* bids, taxrank_scores** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(weights != nullptr, "weights is null");
    const std::size_t n = num_users * num_items;
    taxrank::Matrix w(num_users, num_items, std::vector<double>(weights, weights + n));
    std::vector<double> g = gamma ? std::vector<double>(gamma, gamma + num_items)
                                  : std::vector<double>(num_items, 1.0);
    std::optional<std::vector<double>> b;
    if (bids) b.emplace(bids, bids + num_items);
    auto scores = taxrank::ScoreMatrix::Create(std::move(w), std::move(g), std::move(b));
    *out = new taxrank_scores{
        {std::move(scores), taxrank::io::DefaultIds(num_users, num_items)}};
  });
}

taxrank_status taxrank_scores_load(const char* path, taxrank_format format,
                                   taxrank_mode mode, taxrank_scores** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    Require(path != nullptr, "path is null");
    const auto f = format == TAXRANK_FORMAT_TRIPLET ? taxrank::io::ScoreFormat::kTriplet
                                                    : taxrank::io::ScoreFormat::kDense;
    *out = new taxrank_scores{taxrank::io::LoadScores(path, f, ToMode(mode))};
  });
}

taxrank_status taxrank_scores_synthesize(size_t num_users, size_t num_items,
                                         taxrank_distribution distribution,
                                         uint64_t seed, taxrank_scores** out) {
  return Guard([&] {
    Require(out != nullptr, "out is null");
    const auto d = distribution == TAXRANK_DIST_POWERLAW
                       ? taxrank::pipeline::SynthDistribution::kPowerlaw
                       : taxrank::pipeline::SynthDistribution::kUniform;
    auto scores = taxrank::pipeline::Synthesize(num_users, num_items, d, seed);
    *out = new taxrank_scores{
        {std::move(scores), taxrank::io::DefaultIds(num_users, num_items)}};
  });
}

taxrank_status taxrank_scores_attach_bids(taxrank_scores* scores, const char* bids_path,
                                          int unit_gamma) {
  return Guard([&] {
    Require(scores != nullptr, "scores is null");
    Require(bids_path != nullptr, "bids path is null");
    auto bids = taxrank::io::LoadBids(bids_path, scores->data.ids);
    scores->data = taxrank::io::WithBids(scores->data, std::move(bids), unit_gamma != 0);
  });
}

taxrank_status taxrank_scores_save_dense(const taxrank_scores* scores, const char* path) {
  return Guard([&] {
    Require(scores != nullptr && path != nullptr, "null argument");
    taxrank::io::SaveScoresDense(scores->data, path);
  });
}

taxrank_status taxrank_scores_save_id_map(const taxrank_scores* scores, const char* path) {
  return Guard([&] {
    Require(scores != nullptr && path != nullptr, "null argument");
    taxrank::io::SaveIdMap(scores->data.ids, path);
  });
}

size_t taxrank_scores_num_users(const taxrank_scores* scores) {
  return scores ? scores->data.scores.num_users() : 0;
}

size_t taxrank_scores_num_items(const taxrank_scores* scores) {
  return scores ? scores->data.scores.num_items() : 0;
}

int taxrank_scores_has_bids(const taxrank_scores* scores) {
  return scores && scores->data.scores.bids().has_value();
}

void taxrank_scores_free(taxrank_scores* scores) { delete scores; }

taxrank_status taxrank_solve_exposure(const taxrank_scores* scores,
                                      const taxrank_config* config, double* e_out) {
  return Guard([&] {
    Require(scores != nullptr && e_out != nullptr, "null argument");
    const auto problem = taxrank::waterfill::BuildProblem(scores->data.scores, ToConfig(config));
    const auto e = taxrank::waterfill::Solve(problem);
    std::copy(e.e.begin(), e.e.end(), e_out);
  });
}

taxrank_status taxrank_rank(const taxrank_scores* scores, const taxrank_config* config,
                            int sample, taxrank_result** out) {
  return Guard([&] {
    Require(scores != nullptr && out != nullptr, "null argument");
    *out = new taxrank_result{
        taxrank::pipeline::Rank(scores->data.scores, ToConfig(config), sample != 0)};
  });
}

taxrank_status taxrank_result_exposure(const taxrank_result* result, double* e_out,
                                       size_t len) {
  return Guard([&] {
    Require(result != nullptr && e_out != nullptr, "null argument");
    const auto& e = result->result.exposure.e;
    RequireLength(len, e.size());
    std::copy(e.begin(), e.end(), e_out);
  });
}

taxrank_status taxrank_result_probabilities(const taxrank_result* result, double* x_out,
                                            size_t len) {
  return Guard([&] {
    Require(result != nullptr && x_out != nullptr, "null argument");
    const auto& x = result->result.projection.probs.x.data();
    RequireLength(len, x.size());
    std::copy(x.begin(), x.end(), x_out);
  });
}

taxrank_status taxrank_result_list(const taxrank_result* result, size_t user,
                                   size_t* items_out, size_t len) {
  return Guard([&] {
    Require(result != nullptr && items_out != nullptr, "null argument");
    Require(result->result.lists.has_value(), "result was computed without sampling");
    const auto& lists = *result->result.lists;
    if (user >= lists.num_users()) {
      taxrank::Fail(ErrorCode::kDimensionMismatch,
                    "users axis: index " + std::to_string(user) + " out of range");
    }
    RequireLength(len, lists.k());
    const auto row = lists.list(user);
    std::copy(row.begin(), row.end(), items_out);
  });
}

taxrank_status taxrank_result_metrics(const taxrank_result* result, int realized,
                                      taxrank_metrics* out) {
  return Guard([&] {
    Require(result != nullptr && out != nullptr, "null argument");
    if (realized) {
      Require(result->result.realized.has_value(), "result was computed without sampling");
      Fill(*result->result.realized, out);
    } else {
      Fill(result->result.expected, out);
    }
  });
}

taxrank_status taxrank_result_diagnostics(const taxrank_result* result,
                                          taxrank_diagnostics* out) {
  return Guard([&] {
    Require(result != nullptr && out != nullptr, "null argument");
    const auto& s = result->result.projection.state;
    const auto& t = result->result.timings;
    out->converged = s.converged;
    out->log_domain = s.log_domain;
    out->iterations = s.iterations_run;
    out->newton_steps = s.newton_steps;
    out->row_error = s.row_error;
    out->column_error = s.column_error;
    out->clamped_mass = s.clamped_mass;
    out->capped_entries = s.capped_entries;
    out->num_warnings = s.warnings.size();
    out->solve_seconds = t.solve_seconds;
    out->project_seconds = t.project_seconds;
    out->sample_seconds = t.sample_seconds;
  });
}

const char* taxrank_result_warning(const taxrank_result* result, size_t index) {
  if (result == nullptr) return nullptr;
  const auto& w = result->result.projection.state.warnings;
  return index < w.size() ? w[index].c_str() : nullptr;
}

taxrank_status taxrank_result_save_lists(const taxrank_result* result,
                                         const taxrank_scores* scores, const char* path) {
  return Guard([&] {
    Require(result != nullptr && scores != nullptr && path != nullptr, "null argument");
    Require(result->result.lists.has_value(), "result was computed without sampling");
    taxrank::io::SaveLists(*result->result.lists, scores->data.ids, path);
  });
}

taxrank_status taxrank_result_save_probabilities(const taxrank_result* result,
                                                 const taxrank_scores* scores,
                                                 const char* path) {
  return Guard([&] {
    Require(result != nullptr && scores != nullptr && path != nullptr, "null argument");
    taxrank::io::SaveProbabilities(result->result.projection.probs, scores->data.ids, path);
  });
}

taxrank_status taxrank_result_save_summary(const taxrank_result* result, const char* path) {
  return Guard([&] {
    Require(result != nullptr && path != nullptr, "null argument");
    taxrank::pipeline::SaveSummary(result->result.expected, result->result.realized, path);
  });
}

taxrank_status taxrank_result_save_lorenz(const taxrank_result* result,
                                          const taxrank_scores* scores, const char* path) {
  return Guard([&] {
    Require(result != nullptr && scores != nullptr && path != nullptr, "null argument");
    const auto points = taxrank::metrics::LorenzPoints(result->result.expected.utilities,
                                                       scores->data.scores.gamma());
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : points) {
      rows.push_back({taxrank::io::FormatNumber(p.population_share),
                      taxrank::io::FormatNumber(p.utility_share)});
    }
    const std::vector<std::string> header{"population_share", "utility_share"};
    taxrank::io::SaveTable(path, header, rows);
  });
}

void taxrank_result_free(taxrank_result* result) { delete result; }

taxrank_status taxrank_lists_load(const char* path, const taxrank_scores* scores,
                                  taxrank_lists** out) {
  return Guard([&] {
    Require(path != nullptr && scores != nullptr && out != nullptr, "null argument");
    auto lists = taxrank::io::LoadLists(path, scores->data.ids);
    lists.Validate(scores->data.scores.num_items());
    *out = new taxrank_lists{std::move(lists)};
  });
}

taxrank_status taxrank_lists_evaluate(const taxrank_lists* lists,
                                      const taxrank_scores* scores, taxrank_mode mode,
                                      taxrank_metrics* out) {
  return Guard([&] {
    Require(lists != nullptr && scores != nullptr && out != nullptr, "null argument");
    Fill(taxrank::pipeline::Evaluate(scores->data.scores, lists->lists, ToMode(mode)), out);
  });
}

void taxrank_lists_free(taxrank_lists* lists) { delete lists; }

taxrank_status taxrank_sweep_run(const taxrank_scores* scores,
                                 const taxrank_config* config, const double* t_grid,
                                 size_t grid_len, taxrank_sweep** out) {
  return Guard([&] {
    Require(scores != nullptr && out != nullptr, "null argument");
    Require(t_grid != nullptr || grid_len == 0, "t grid is null");
    const auto base = ToConfig(config);
    *out = new taxrank_sweep{taxrank::pipeline::Sweep(
        scores->data.scores, base, std::span<const double>(t_grid, grid_len),
        ToSweepOptions(config))};
  });
}

size_t taxrank_sweep_size(const taxrank_sweep* sweep) {
  return sweep ? sweep->sweep.points.size() : 0;
}

taxrank_status taxrank_sweep_point(const taxrank_sweep* sweep, size_t index,
                                   taxrank_tradeoff_point* out) {
  return Guard([&] {
    Require(sweep != nullptr && out != nullptr, "null argument");
    Require(index < sweep->sweep.points.size(), "sweep index out of range");
    const auto& p = sweep->sweep.points[index];
    out->tax_rate = p.tax_rate;
    out->ecn = p.ecn;
    out->has_ecpm = p.ecpm.has_value();
    out->ecpm = p.ecpm.value_or(0.0);
    out->gini = p.gini;
    out->pot = p.pot;
    out->pot_bound = sweep->sweep.pot_bound[index];
  });
}

taxrank_status taxrank_sweep_save(const taxrank_sweep* sweep, const char* path) {
  return Guard([&] {
    Require(sweep != nullptr && path != nullptr, "null argument");
    taxrank::pipeline::SaveSweep(sweep->sweep, path);
  });
}

taxrank_status taxrank_sweep_save_lorenz(const taxrank_sweep* sweep, const char* path) {
  return Guard([&] {
    Require(sweep != nullptr && path != nullptr, "null argument");
    taxrank::pipeline::SaveSweepLorenz(sweep->sweep, path);
  });
}

void taxrank_sweep_free(taxrank_sweep* sweep) { delete sweep; }

taxrank_status taxrank_continuity_run(const taxrank_scores* scores,
                                      const taxrank_config* config, const double* t_grid,
                                      size_t grid_len, double delta,
                                      taxrank_continuity** out) {
  return Guard([&] {
    Require(scores != nullptr && out != nullptr, "null argument");
    Require(t_grid != nullptr || grid_len == 0, "t grid is null");
    const auto base = ToConfig(config);
    *out = new taxrank_continuity{taxrank::pipeline::Continuity(
        scores->data.scores, base, std::span<const double>(t_grid, grid_len), delta,
        ToSweepOptions(config))};
  });
}

size_t taxrank_continuity_size(const taxrank_continuity* report) {
  return report ? report->rows.size() : 0;
}

taxrank_status taxrank_continuity_row_at(const taxrank_continuity* report, size_t index,
                                         taxrank_continuity_row* out) {
  return Guard([&] {
    Require(report != nullptr && out != nullptr, "null argument");
    Require(index < report->rows.size(), "continuity index out of range");
    const auto& r = report->rows[index];
    *out = taxrank_continuity_row{r.tax_rate,          r.lambda,
                                  r.taxrank_ecn,       r.taxrank_gini,
                                  r.taxrank_ecn_jump,  r.taxrank_gini_jump,
                                  r.baseline_ecn,      r.baseline_gini,
                                  r.baseline_ecn_jump, r.baseline_gini_jump};
  });
}

taxrank_status taxrank_continuity_save(const taxrank_continuity* report,
                                       const char* path) {
  return Guard([&] {
    Require(report != nullptr && path != nullptr, "null argument");
    taxrank::pipeline::SaveContinuity(report->rows, path);
  });
}

void taxrank_continuity_free(taxrank_continuity* report) { delete report; }

taxrank_status taxrank_gini(const double* v, const double* gamma, size_t len,
                            double* out) {
  return Guard([&] {
    Require(v != nullptr && out != nullptr, "null argument");
    taxrank::UtilityVector u{std::vector<double>(v, v + len)};
    const std::vector<double> g =
        gamma ? std::vector<double>(gamma, gamma + len) : std::vector<double>(len, 1.0);
    *out = taxrank::metrics::Gini(u, g);
  });
}

taxrank_status taxrank_pot_bound(size_t num_users, double tax_rate, double* out) {
  return Guard([&] {
    Require(out != nullptr, "null argument");
    *out = taxrank::metrics::PotBound(num_users, tax_rate);
  });
}

}  // extern "C"
