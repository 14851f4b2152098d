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

// taxrank command-line tool. Talks to the library only through taxrank.h.
//
// Exit codes: 0 success, 1 numerical failure, 2 input error.

#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "taxrank/taxrank.h"

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitInput = 2;

// Thrown on any failing library call; carries the exit code to return.
struct Failure {
  int exit_code;
};

void Check(taxrank_status status, const std::string& context) {
  if (status == TAXRANK_OK) return;
  std::fprintf(stderr, "taxrank: %s: %s\n", context.c_str(), taxrank_last_error());
  throw Failure{status == TAXRANK_ERR_NUMERICAL ? kExitNumerical : kExitInput};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Scores = std::unique_ptr<taxrank_scores, Deleter<taxrank_scores, taxrank_scores_free>>;
using Result = std::unique_ptr<taxrank_result, Deleter<taxrank_result, taxrank_result_free>>;
using Lists = std::unique_ptr<taxrank_lists, Deleter<taxrank_lists, taxrank_lists_free>>;
using Sweep = std::unique_ptr<taxrank_sweep, Deleter<taxrank_sweep, taxrank_sweep_free>>;
using Continuity =
    std::unique_ptr<taxrank_continuity, Deleter<taxrank_continuity, taxrank_continuity_free>>;

struct Common {
  std::string scores;
  std::string format = "dense";
  std::string bids;
  bool unit_gamma = false;
  std::size_t k = 10;
  double lambda_ot = 0.1;
  std::uint64_t seed = 0;
  std::string mode = "ctr";
  std::size_t jobs = 0;
  bool timings = false;
};

const std::map<std::string, taxrank_mode> kModes{{"exposure", TAXRANK_MODE_EXPOSURE},
                                                 {"ctr", TAXRANK_MODE_CTR}};
const std::map<std::string, taxrank_format> kFormats{{"dense", TAXRANK_FORMAT_DENSE},
                                                     {"triplet", TAXRANK_FORMAT_TRIPLET}};
const std::map<std::string, taxrank_distribution> kDistributions{
    {"uniform", TAXRANK_DIST_UNIFORM}, {"powerlaw", TAXRANK_DIST_POWERLAW}};

void AddScoreOptions(CLI::App* cmd, Common& c) {
  cmd->add_option("--scores", c.scores, "score matrix CSV")->required();
  cmd->add_option("--format", c.format, "dense or triplet")
      ->check(CLI::IsMember({"dense", "triplet"}));
  cmd->add_option("--bids", c.bids, "item_id,bid CSV; enables eCPM");
  cmd->add_flag("--unit-gamma", c.unit_gamma, "keep gamma = 1 when bids are given");
  cmd->add_option("--mode", c.mode, "exposure or ctr")
      ->check(CLI::IsMember({"exposure", "ctr"}));
}

void AddRunOptions(CLI::App* cmd, Common& c) {
  AddScoreOptions(cmd, c);
  cmd->add_option("--k", c.k, "list length")->check(CLI::PositiveNumber);
  cmd->add_option("--lambda-ot", c.lambda_ot, "entropic temperature");
  cmd->add_option("--seed", c.seed, "sampling seed");
}

Scores LoadScores(const Common& c) {
  taxrank_scores* raw = nullptr;
  Check(taxrank_scores_load(c.scores.c_str(), kFormats.at(c.format), kModes.at(c.mode), &raw),
        "loading scores");
  Scores scores(raw);
  if (!c.bids.empty()) {
    Check(taxrank_scores_attach_bids(scores.get(), c.bids.c_str(), c.unit_gamma),
          "loading bids");
  }
  return scores;
}

taxrank_config MakeConfig(const Common& c, double tax_rate) {
  taxrank_config config;
  taxrank_config_init(&config);
  config.k = c.k;
  config.tax_rate = tax_rate;
  config.lambda_ot = c.lambda_ot;
  config.seed = c.seed;
  config.mode = kModes.at(c.mode);
  config.jobs = c.jobs;
  return config;
}

void PrintMetrics(const char* label, const taxrank_metrics& m) {
  std::printf("%s ecn=%.9g", label, m.ecn);
  if (m.has_ecpm) std::printf(" ecpm=%.9g", m.ecpm);
  std::printf(" gini=%.9g accuracy=%.9g\n", m.gini, m.accuracy);
}

int RunRank(const Common& c, double tax_rate, const std::string& out_dir) {
  Scores scores = LoadScores(c);
  const taxrank_config config = MakeConfig(c, tax_rate);
  taxrank_result* raw = nullptr;
  Check(taxrank_rank(scores.get(), &config, 1, &raw), "rank");
  Result result(raw);

  taxrank_diagnostics d;
  Check(taxrank_result_diagnostics(result.get(), &d), "diagnostics");
  for (std::size_t j = 0; j < d.num_warnings; ++j) {
    std::fprintf(stderr, "taxrank: warning: %s\n", taxrank_result_warning(result.get(), j));
  }
  if (c.timings) {
    std::fprintf(stderr, "solve %.6fs project %.6fs sample %.6fs\n", d.solve_seconds,
                 d.project_seconds, d.sample_seconds);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "taxrank: cannot create %s: %s\n", out_dir.c_str(),
                 ec.message().c_str());
    return kExitInput;
  }
  const std::filesystem::path dir(out_dir);
  Check(taxrank_result_save_lists(result.get(), scores.get(), (dir / "lists.csv").c_str()),
        "writing lists");
  Check(taxrank_result_save_probabilities(result.get(), scores.get(),
                                          (dir / "probs.csv").c_str()),
        "writing probabilities");
  Check(taxrank_result_save_summary(result.get(), (dir / "summary.csv").c_str()),
        "writing summary");
  Check(taxrank_scores_save_id_map(scores.get(), (dir / "id_map.csv").c_str()),
        "writing id map");
  Check(taxrank_result_save_lorenz(result.get(), scores.get(), (dir / "lorenz.csv").c_str()),
        "writing lorenz curve");

  taxrank_metrics m;
  Check(taxrank_result_metrics(result.get(), 0, &m), "metrics");
  PrintMetrics("expected", m);
  Check(taxrank_result_metrics(result.get(), 1, &m), "metrics");
  PrintMetrics("realized", m);
  return 0;
}

int RunSweep(const Common& c, const std::vector<double>& grid, bool realized,
             const std::string& out, const std::string& lorenz_out) {
  Scores scores = LoadScores(c);
  taxrank_config config = MakeConfig(c, 0.0);
  config.realized = realized;
  taxrank_sweep* raw = nullptr;
  Check(taxrank_sweep_run(scores.get(), &config, grid.data(), grid.size(), &raw), "sweep");
  Sweep sweep(raw);
  Check(taxrank_sweep_save(sweep.get(), out.c_str()), "writing trade-off table");
  if (!lorenz_out.empty()) {
    Check(taxrank_sweep_save_lorenz(sweep.get(), lorenz_out.c_str()), "writing lorenz curves");
  }
  return 0;
}

int RunContinuity(const Common& c, const std::vector<double>& grid, double delta,
                  bool realized, const std::string& out) {
  Scores scores = LoadScores(c);
  taxrank_config config = MakeConfig(c, 0.0);
  config.realized = realized;
  taxrank_continuity* raw = nullptr;
  Check(taxrank_continuity_run(scores.get(), &config, grid.data(), grid.size(), delta, &raw),
        "continuity");
  Continuity report(raw);
  Check(taxrank_continuity_save(report.get(), out.c_str()), "writing continuity table");
  return 0;
}

int RunSynth(std::size_t users, std::size_t items, const std::string& distribution,
             std::uint64_t seed, const std::string& out) {
  taxrank_scores* raw = nullptr;
  Check(taxrank_scores_synthesize(users, items, kDistributions.at(distribution), seed, &raw),
        "synth");
  Scores scores(raw);
  Check(taxrank_scores_save_dense(scores.get(), out.c_str()), "writing scores");
  return 0;
}

int RunMetrics(const Common& c, const std::string& lists_path) {
  Scores scores = LoadScores(c);
  taxrank_lists* raw = nullptr;
  Check(taxrank_lists_load(lists_path.c_str(), scores.get(), &raw), "loading lists");
  Lists lists(raw);
  taxrank_metrics m;
  Check(taxrank_lists_evaluate(lists.get(), scores.get(), kModes.at(c.mode), &m),
        "evaluating lists");
  PrintMetrics("realized", m);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tax-rank fair re-ranking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(taxrank_version()));

  Common common;
  double tax_rate = 0.0;
  std::string out;
  std::string lorenz_out;
  std::vector<double> grid{0, 0.25, 0.5, 1, 2, 4, 8};
  double delta = 0.01;
  bool realized = false;
  std::size_t users = 0;
  std::size_t items = 0;
  std::string distribution = "uniform";
  std::string lists_path;

  auto* rank = app.add_subcommand("rank", "rank one instance at a single tax rate");
  AddRunOptions(rank, common);
  rank->add_option("--tax-rate", tax_rate, "tax rate t >= 0");
  rank->add_option("--out", out, "output directory")->required();
  rank->add_flag("--timings", common.timings, "print stage wall-clock to stderr");

  auto* sweep = app.add_subcommand("sweep", "trade-off table over a tax-rate grid");
  AddRunOptions(sweep, common);
  sweep->add_option("--t-grid", grid, "ascending tax rates")->delimiter(',');
  sweep->add_option("--jobs", common.jobs, "worker threads (0 = all cores)");
  sweep->add_flag("--realized", realized, "metrics on sampled lists");
  sweep->add_option("--out", out, "trade-off CSV")->required();
  sweep->add_option("--lorenz-out", lorenz_out, "Lorenz curves CSV");

  auto* cont = app.add_subcommand("continuity", "metric jumps under small tax changes");
  AddRunOptions(cont, common);
  cont->add_option("--t-grid", grid, "ascending tax rates")->delimiter(',');
  cont->add_option("--delta", delta, "tax-rate step")->check(CLI::NonNegativeNumber);
  cont->add_option("--jobs", common.jobs, "worker threads (0 = all cores)");
  cont->add_flag("--realized", realized, "metrics on sampled lists");
  cont->add_option("--out", out, "continuity CSV")->required();

  auto* synth = app.add_subcommand("synth", "write a synthetic ctr score matrix");
  synth->add_option("--users", users, "number of users")->required()->check(CLI::PositiveNumber);
  synth->add_option("--items", items, "number of items")->required()->check(CLI::PositiveNumber);
  synth->add_option("--distribution", distribution, "uniform or powerlaw")
      ->check(CLI::IsMember({"uniform", "powerlaw"}));
  synth->add_option("--seed", common.seed, "generator seed");
  synth->add_option("--out", out, "dense score CSV")->required();

  auto* metrics = app.add_subcommand("metrics", "recompute metrics from saved lists");
  AddScoreOptions(metrics, common);
  metrics->add_option("--lists", lists_path, "user_id,rank,item_id CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*rank) return RunRank(common, tax_rate, out);
    if (*sweep) return RunSweep(common, grid, realized, out, lorenz_out);
    if (*cont) return RunContinuity(common, grid, delta, realized, out);
    if (*synth) return RunSynth(users, items, distribution, common.seed, out);
    if (*metrics) return RunMetrics(common, lists_path);
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return kExitInput;
}
