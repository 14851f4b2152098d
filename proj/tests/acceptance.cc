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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Artifacts go to the directory given as argv[1]
// (default: the working directory).

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "taxrank/io.hpp"
#include "taxrank/metrics.hpp"
#include "taxrank/pipeline.hpp"
#include "taxrank/policies.hpp"
#include "taxrank/random.hpp"
#include "taxrank/sampling.hpp"
#include "taxrank/transport.hpp"
#include "taxrank/waterfill.hpp"

using namespace taxrank;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

fs::path artifacts = ".";

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failing condition.
  void Expect(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

RankingConfig Config(std::size_t k, double t, double lambda = 0.1) {
  RankingConfig c;
  c.k = k;
  c.tax_rate = t;
  c.lambda_ot = lambda;
  return c;
}

// Fixture shared by criteria 6 and 7.
ScoreMatrix PowerlawFixture() {
  return pipeline::Synthesize(50, 20, pipeline::SynthDistribution::kPowerlaw, 7);
}

// Independent KKT check: marginals g_i = a_i e_i^-t must be equal on interior
// coordinates, no smaller at the cap and no larger at the floor.
double KktGap(const std::vector<double>& a, const std::vector<double>& e, double t) {
  double low_side = 0.0;        // max over interior and floor
  double high_side = INFINITY;  // min over interior and cap
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double g = a[i] * std::pow(e[i], -t);
    scale = std::max(scale, g);
    const bool at_cap = e[i] >= 1.0 - 1e-12;
    const bool at_floor = e[i] <= waterfill::kFloor * (1.0 + 1e-6);
    if (!at_cap) low_side = std::max(low_side, g);
    if (!at_floor) high_side = std::min(high_side, g);
  }
  return std::max(0.0, low_side - high_side) / scale;
}

Outcome WaterfillOptimality() {
  Outcome o;
  Rng rng(1);
  const auto start = Clock::now();
  double worst_gap = 0.0, worst_kkt = 0.0;
  for (int rep = 0; rep < 500; ++rep) {
    const std::size_t n = 2 + rng.Below(5);
    const std::size_t k = 1 + rng.Below(std::min<std::size_t>(3, n));
    const double t = 3.0 * rng.Uniform();
    std::vector<double> a(n);
    for (double& x : a) x = 0.01 + rng.Uniform();
    const auto e = waterfill::Solve(waterfill::MakeProblem(a, k, t)).e;
    const auto ref = oracle::ProjectedGradient(a, static_cast<double>(k), t, waterfill::kFloor);
    const double gap = oracle::AlphaFair(a, ref, t) - oracle::AlphaFair(a, e, t);
    worst_gap = std::max(worst_gap, gap);
    worst_kkt = std::max(worst_kkt, KktGap(a, e, t));
    double sum = 0.0;
    for (double x : e) sum += x;
    o.Expect(std::abs(sum - k) <= 1e-8, "exposure does not sum to K");
  }
  const double elapsed = Seconds(start);
  o.Expect(worst_gap <= 1e-6, Fmt("oracle beats solver by %.3g", worst_gap));
  o.Expect(worst_kkt <= 1e-6, Fmt("KKT residual %.3g", worst_kkt));
  o.Expect(elapsed < 10.0, Fmt("took %.2f s", elapsed));
  if (o.pass) {
    o.detail = Fmt("500 instances, oracle gap %.2g, KKT %.2g, %.2f s", worst_gap, worst_kkt,
                   elapsed);
  }
  return o;
}

Outcome SpecialCases() {
  Outcome o;
  // t = 0: greedy top-K of the coefficients, on a random instance and through
  // the pipeline on a rank-consistent one.
  Rng rng(2);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 3 + rng.Below(20);
    const std::size_t k = 1 + rng.Below(n - 1);
    std::vector<double> a(n);
    for (double& x : a) x = rng.Uniform();
    const auto e = waterfill::Solve(waterfill::MakeProblem(a, k, 0.0)).e;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return a[l] > a[r]; });
    for (std::size_t j = 0; j < n; ++j) {
      const bool top = j < k;
      o.Expect(top ? e[order[j]] >= 1.0 - 1e-6 : e[order[j]] <= 1e-6,
               "t=0 exposure is not the top-K indicator");
    }
  }
  Matrix w(10, 6);
  for (std::size_t u = 0; u < 10; ++u) {
    for (std::size_t i = 0; i < 6; ++i) w(u, i) = (0.3 + 0.07 * u) * (6.0 - i) / 6.0;
  }
  const auto consistent = ScoreMatrix::Create(w);
  RankingConfig zero = Config(2, 0.0);
  o.Expect(*pipeline::Rank(consistent, zero).lists == policies::TopK(consistent, 2),
           "t=0 lists differ from top-K");

  // Two items with effective weights 2 and 5, K = 1.
  const auto two = ScoreMatrix::Create(Matrix(1, 2, 1.0), {2.0, 5.0});
  const auto v1 = pipeline::Rank(two, Config(1, 1.0), false).expected.utilities.v;
  const double ratio = v1[0] / v1[1];
  o.Expect(std::abs(ratio - 0.4) <= 1e-3 * 0.4, Fmt("t=1 ratio %.6f, want 0.4", ratio));

  // t = 1000: uncapped coordinates equalize.
  double spread = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> a(8);
    for (double& x : a) x = 0.05 + rng.Uniform();
    const auto e = waterfill::Solve(waterfill::MakeProblem(a, 3, 1000.0)).e;
    double lo = INFINITY, hi = 0.0;
    for (double x : e) {
      if (x >= 1.0 - 1e-12) continue;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    spread = std::max(spread, hi - lo);
  }
  o.Expect(spread <= 1e-2, Fmt("t=1000 spread %.3g", spread));
  if (o.pass) o.detail = Fmt("t=1 ratio %.6f, t=1000 spread %.2g", ratio, spread);
  return o;
}

Outcome SinkhornFeasibility() {
  Outcome o;
  Rng rng(3);
  double worst = 0.0;
  int converged = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t users = 2 + rng.Below(40);
    const std::size_t items = 2 + rng.Below(20);
    const std::size_t k = 1 + rng.Below(items);
    Matrix w(users, items);
    for (std::size_t u = 0; u < users; ++u) {
      for (std::size_t i = 0; i < items; ++i) w(u, i) = rng.Uniform();
    }
    const auto s = ScoreMatrix::Create(std::move(w));
    const auto config = Config(k, 4.0 * rng.Uniform(), 0.05 + rng.Uniform());
    const auto e = waterfill::Solve(waterfill::BuildProblem(s, config));
    const auto p = transport::Project(s, e, config);
    if (!p.state.converged) continue;
    ++converged;
    double row = 0.0, col = 0.0;
    for (std::size_t u = 0; u < users; ++u) {
      double sum = 0.0;
      for (double x : p.probs.x.row(u)) sum += x;
      row += std::abs(sum - static_cast<double>(k));
    }
    for (std::size_t i = 0; i < items; ++i) {
      double sum = 0.0;
      for (std::size_t u = 0; u < users; ++u) sum += p.probs.x(u, i);
      col += std::abs(sum - static_cast<double>(users) * e.e[i]);
    }
    worst = std::max({worst, row, col});
  }
  o.Expect(worst <= 1e-6, Fmt("marginal L1 error %.3g", worst));
  o.Expect(converged > 0, "no run converged");

  const auto s = ScoreMatrix::Create(Matrix(2, 2, {1, 0, 0, 1}));
  const auto p = transport::Project(s, ExposureVector{{0.5, 0.5}}, Config(1, 0.1));
  // LP optimum by enumeration: the identity assignment.
  double lp_error = 0.0;
  const double identity[4] = {1, 0, 0, 1};
  for (std::size_t j = 0; j < 4; ++j) {
    lp_error = std::max(lp_error, std::abs(p.probs.x.data()[j] - identity[j]));
  }
  o.Expect(lp_error <= 1e-3, Fmt("2x2 off the LP optimum by %.3g", lp_error));
  if (o.pass) {
    o.detail = Fmt("%.0f/100 converged, worst L1 %.2g, 2x2 error %.2g", converged, worst,
                   lp_error);
  }
  return o;
}

Outcome SamplerExactness() {
  Outcome o;
  Rng gen(4);
  const int draws = 10000;
  std::size_t checked = 0, outside = 0;
  double worst_z = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + gen.Below(12);
    const std::size_t k = 1 + gen.Below(n);
    std::vector<double> y(n);
    for (double& v : y) v = gen.Uniform();
    // Capped rescaling of y to sum k.
    double lo = 0.0, hi = 1e9;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      double s = 0.0;
      for (double v : y) s += std::min(1.0, mid * v);
      (s < static_cast<double>(k) ? lo : hi) = mid;
    }
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) row[i] = std::min(1.0, hi * y[i]);

    std::vector<double> freq(n, 0.0);
    Rng rng(1000 + rep);
    for (int d = 0; d < draws; ++d) {
      const auto picked = sampling::SampleRow(row, k, rng);
      const std::set<std::size_t> unique(picked.begin(), picked.end());
      o.Expect(picked.size() == k && unique.size() == k, "list without K distinct items");
      for (std::size_t i : picked) freq[i] += 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double f = freq[i] / draws;
      const double se = std::sqrt(row[i] * (1.0 - row[i]) / draws);
      const double dev = std::abs(f - row[i]);
      ++checked;
      if (se == 0.0) {
        if (dev > 1e-12) ++outside;
        continue;
      }
      worst_z = std::max(worst_z, dev / se);
      if (dev > 3.0 * se) ++outside;
    }
  }
  // An exact sampler still leaves each item outside 3 SE with probability
  // 0.0027; report that expectation next to the observed count.
  o.Expect(outside == 0,
           Fmt("%.0f of %.0f items outside 3 SE", static_cast<double>(outside),
               static_cast<double>(checked)) +
               Fmt(" (max |z| %.2f, %.1f expected by chance)", worst_z,
                   0.0027 * static_cast<double>(checked)));
  if (o.pass) {
    o.detail = Fmt("%.0f items within 3 SE, max |z| %.2f", static_cast<double>(checked),
                   worst_z);
  }
  return o;
}

Outcome MetricOracles() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0, worst_lorenz = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.Below(100);
    std::vector<double> v(n);
    for (double& x : v) x = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform();
    v[rng.Below(n)] += 0.5;
    const std::vector<double> unit(n, 1.0);
    const double g = metrics::Gini({v}, unit);
    worst = std::max(worst, std::abs(g - oracle::NaiveGini(v)));
    const auto points = metrics::LorenzPoints({v}, unit);
    worst_lorenz = std::max(worst_lorenz, std::abs(metrics::GiniFromLorenz(points) - g));
  }
  const double g4 = metrics::Gini({{0, 0, 0, 1}}, std::vector<double>(4, 1.0));
  o.Expect(worst <= 1e-12, Fmt("fast vs naive Gini differ by %.3g", worst));
  o.Expect(g4 == 0.75, Fmt("Gini([0,0,0,1]) = %.17g", g4));
  o.Expect(worst_lorenz <= 1e-9, Fmt("Lorenz identity off by %.3g", worst_lorenz));
  if (o.pass) o.detail = Fmt("naive %.2g, Lorenz %.2g", worst, worst_lorenz);
  return o;
}

Outcome TradeoffMonotonicity() {
  Outcome o;
  const auto s = PowerlawFixture();
  const double grid[] = {0.0, 0.5, 1.0, 2.0, 4.0};
  const auto sweep = pipeline::Sweep(s, Config(5, 0.0), grid);
  const auto& p = sweep.points;
  o.Expect(p[0].pot == 0.0, Fmt("POT(0) = %.3g", p[0].pot));
  for (std::size_t j = 1; j < p.size(); ++j) {
    o.Expect(p[j].ecn <= p[j - 1].ecn + 1e-6,
             Fmt("eCN rises from t=%g to t=%g", grid[j - 1], grid[j]));
    o.Expect(p[j].gini <= p[j - 1].gini + 1e-6,
             Fmt("Gini rises from t=%g to t=%g", grid[j - 1], grid[j]));
    o.Expect(p[j].pot >= p[j - 1].pot - 1e-6,
             Fmt("POT falls from t=%g to t=%g", grid[j - 1], grid[j]));
  }
  pipeline::SaveSweep(sweep, artifacts / "acceptance_tradeoff.csv");
  if (o.pass) {
    o.detail = Fmt("eCN %.4f -> %.4f, Gini %.4f -> ", p.front().ecn, p.back().ecn,
                   p.front().gini) +
               Fmt("%.4f", p.back().gini);
  }
  return o;
}

double MaxOverMedian(const std::vector<double>& jumps) {
  const double median = oracle::Median(jumps);
  const double largest = *std::max_element(jumps.begin(), jumps.end());
  if (median == 0.0) return largest == 0.0 ? 0.0 : INFINITY;
  return largest / median;
}

Outcome ContinuityContrast() {
  Outcome o;
  const auto s = PowerlawFixture();
  std::vector<double> grid(200);
  const double step = 4.0 / 199.0;
  for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = step * static_cast<double>(j);
  const auto rows = pipeline::Continuity(s, Config(5, 0.0), grid, step);
  pipeline::SaveContinuity(rows, artifacts / "acceptance_continuity.csv");
  std::vector<double> tr_ecn, tr_gini, bl_ecn, bl_gini;
  for (const auto& r : rows) {
    tr_ecn.push_back(r.taxrank_ecn_jump);
    tr_gini.push_back(r.taxrank_gini_jump);
    bl_ecn.push_back(r.baseline_ecn_jump);
    bl_gini.push_back(r.baseline_gini_jump);
  }
  const double te = MaxOverMedian(tr_ecn), tg = MaxOverMedian(tr_gini);
  const double be = MaxOverMedian(bl_ecn), bg = MaxOverMedian(bl_gini);
  o.Expect(te <= 5.0, Fmt("Tax-rank eCN max/median jump %.2f", te));
  o.Expect(tg <= 5.0, Fmt("Tax-rank Gini max/median jump %.2f", tg));
  o.Expect(std::max(be, bg) >= 10.0, Fmt("baseline max/median jump only %.2f", std::max(be, bg)));
  if (o.pass) {
    o.detail = Fmt("Tax-rank max/median eCN %.2f Gini %.2f, ", te, tg) +
               Fmt("baseline eCN %.3g Gini %.3g", be, bg);
  }
  return o;
}

Outcome PotBoundOverlay() {
  Outcome o;
  const auto s = PowerlawFixture();
  std::vector<double> grid;
  for (int j = 0; j <= 16; ++j) grid.push_back(0.25 * j);
  const auto sweep = pipeline::Sweep(s, Config(5, 0.0), grid);
  pipeline::SaveSweep(sweep, artifacts / "acceptance_pot_overlay.csv");
  const std::size_t users = s.num_users();
  o.Expect(sweep.pot_bound.front() == 0.0, "reference is not 0 at t=0");
  for (std::size_t j = 1; j < sweep.pot_bound.size(); ++j) {
    o.Expect(sweep.pot_bound[j] > sweep.pot_bound[j - 1], "reference not increasing");
  }
  const double limit = 1.0 - 1.0 / static_cast<double>(users);
  const double far = metrics::PotBound(users, 1e12);
  o.Expect(std::abs(far - limit) <= 1e-9, Fmt("limit %.12f, want %.12f", far, limit));
  o.Expect(sweep.pot_bound.back() < limit, "reference exceeds its limit");
  if (o.pass) {
    o.detail = Fmt("17 points on [0,4], limit %.4f, measured POT(4) %.4f", limit,
                   sweep.points.back().pot);
  }
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int Shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome EndToEnd() {
  Outcome o;
  const std::string cli = std::string("'") + TAXRANK_CLI + "'";
  const fs::path scores = artifacts / "acceptance_1000x500.csv";
  o.Expect(Shell(cli + " synth --users 1000 --items 500 --distribution powerlaw --seed 9 --out '" +
                 scores.string() + "' >/dev/null") == 0,
           "synth failed");
  double slowest = 0.0;
  std::string first;
  for (int run = 0; run < 2 && o.pass; ++run) {
    const fs::path out = artifacts / ("acceptance_sweep_" + std::to_string(run) + ".csv");
    const auto start = Clock::now();
    const int code = Shell(cli + " sweep --scores '" + scores.string() +
                           "' --k 10 --seed 9 --out '" + out.string() + "' >/dev/null");
    const double elapsed = Seconds(start);
    slowest = std::max(slowest, elapsed);
    o.Expect(code == 0, Fmt("sweep exited %.0f", code));
    const std::string bytes = Slurp(out);
    std::size_t lines = std::count(bytes.begin(), bytes.end(), '\n');
    o.Expect(lines == 8, Fmt("sweep wrote %.0f lines, want 8", static_cast<double>(lines)));
    if (run == 0) {
      first = bytes;
    } else {
      o.Expect(bytes == first, "sweep output differs between runs");
    }
  }
  o.Expect(slowest < 60.0, Fmt("sweep took %.1f s", slowest));
  if (o.pass) o.detail = Fmt("7-point sweep twice, identical bytes, slowest %.1f s", slowest);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) artifacts = argv[1];
  fs::create_directories(artifacts);
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"water-filling optimality", WaterfillOptimality},
      {"special-case anchors", SpecialCases},
      {"Sinkhorn feasibility", SinkhornFeasibility},
      {"sampler exactness", SamplerExactness},
      {"metric oracles", MetricOracles},
      {"trade-off monotonicity", TradeoffMonotonicity},
      {"continuity contrast", ContinuityContrast},
      {"POT reference overlay", PotBoundOverlay},
      {"end-to-end determinism and speed", EndToEnd},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
