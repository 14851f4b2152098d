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


#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "doctest.h"
#include "taxrank/core.hpp"
#include "taxrank/error.hpp"
#include "taxrank/random.hpp"
#include "taxrank/sampling.hpp"

using namespace taxrank;

namespace {

RankingLists Lists(std::size_t k, const std::vector<std::vector<std::size_t>>& rows) {
  RankingLists lists(rows.size(), k);
  for (std::size_t u = 0; u < rows.size(); ++u) {
    std::copy(rows[u].begin(), rows[u].end(), lists.list(u).begin());
  }
  return lists;
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("compute utilities examples") {
  const auto s = ScoreMatrix::Create(Matrix(2, 3, 0.5));
  const auto v = ComputeUtilities(s, Lists(1, {{0}, {0}}), UtilityMode::kExposure);
  CHECK(v.v == std::vector<double>{2, 0, 0});

  const auto one = ScoreMatrix::Create(Matrix(1, 2, {0.2, 0.7}));
  CHECK(ComputeUtilities(one, Lists(1, {{1}}), UtilityMode::kCtr).v ==
        std::vector<double>{0, 0.7});
}

TEST_CASE("compute utilities matches a recount") {
  Rng rng(1);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t items = 2 + rng.Below(8);
    const std::size_t k = 1 + rng.Below(items);
    Matrix w(3, items);
    for (std::size_t u = 0; u < 3; ++u) {
      for (std::size_t i = 0; i < items; ++i) w(u, i) = rng.Uniform();
    }
    const auto s = ScoreMatrix::Create(w);
    RankingLists lists(3, k);
    for (std::size_t u = 0; u < 3; ++u) {
      std::vector<std::size_t> perm(items);
      std::iota(perm.begin(), perm.end(), 0);
      rng.Shuffle(std::span<std::size_t>(perm));
      std::copy(perm.begin(), perm.begin() + k, lists.list(u).begin());
    }
    const auto ctr = ComputeUtilities(s, lists, UtilityMode::kCtr);
    const auto exposure = ComputeUtilities(s, lists, UtilityMode::kExposure);
    double total = 0.0;
    for (std::size_t i = 0; i < items; ++i) {
      double clicks = 0.0, shown = 0.0;
      for (std::size_t u = 0; u < 3; ++u) {
        for (std::size_t j = 0; j < k; ++j) {
          if (lists.list(u)[j] == i) {
            clicks += w(u, i);
            shown += 1.0;
          }
        }
      }
      CHECK(ctr.v[i] == doctest::Approx(clicks).epsilon(1e-15));
      CHECK(exposure.v[i] == shown);
      total += exposure.v[i];
    }
    CHECK(total == static_cast<double>(3 * k));
  }
}

TEST_CASE("expected utilities examples") {
  const auto s = ScoreMatrix::Create(Matrix(2, 2, {0.9, 0.1, 0.4, 0.6}));
  const RankingProbabilities x{Matrix(2, 2, {1, 0, 0.5, 0.5})};
  const auto v = ExpectedUtilities(s, x, UtilityMode::kCtr);
  CHECK(v.v[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(v.v[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ExpectedUtilities(s, x, UtilityMode::kExposure).v == std::vector<double>{1.5, 0.5});

  const RankingProbabilities empty_col{Matrix(2, 2, {1, 0, 1, 0})};
  CHECK(ExpectedUtilities(s, empty_col, UtilityMode::kCtr).v[1] == 0.0);
}

TEST_CASE("sampled utilities average to the expectation") {
  Rng rng(2);
  Matrix w(3, 4);
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t i = 0; i < 4; ++i) w(u, i) = rng.Uniform();
  }
  const auto s = ScoreMatrix::Create(w);
  const RankingProbabilities x{
      Matrix(3, 4, {0.9, 0.6, 0.3, 0.2, 0.5, 0.5, 0.5, 0.5, 1.0, 0.1, 0.1, 0.8})};
  const auto r = sampling::ExpectedVsRealized(x, s, 2, UtilityMode::kCtr, 50000, 77);
  for (double z : r.z) CHECK(std::abs(z) <= 3.0);
}

TEST_CASE("score matrix validation") {
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(0, 0)); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, {0.1, -0.1})); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, {0.1, NAN})); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, 0.1), {1.0}); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, 0.1), {1.0, 0.0}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, 0.1), {1.0, 1.0}, {{1.0}}); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([] { ScoreMatrix::Create(Matrix(1, 2, 0.1), {1.0, 1.0}, {{1.0, -2.0}}); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { Matrix(2, 2, std::vector<double>{1.0}); }) == ErrorCode::kDimensionMismatch);

  const auto big = ScoreMatrix::Create(Matrix(1, 2, {0.5, 1.5}));
  CHECK(CodeOf([&] { big.ValidateFor(UtilityMode::kCtr); }) == ErrorCode::kInvalidArgument);
  big.ValidateFor(UtilityMode::kExposure);
}

TEST_CASE("config validation") {
  const auto s = ScoreMatrix::Create(Matrix(2, 3, 0.5));
  RankingConfig c;
  c.k = 3;
  c.Validate(s);
  c.k = 0;
  CHECK_THROWS_AS(c.Validate(s), Error);
  c.k = 4;
  CHECK_THROWS_AS(c.Validate(s), Error);
  c.k = 2;
  c.tax_rate = -0.5;
  CHECK_THROWS_AS(c.Validate(s), Error);
  c.tax_rate = INFINITY;
  CHECK_THROWS_AS(c.Validate(s), Error);
  c.tax_rate = 1.0;
  c.lambda_ot = 0.0;
  CHECK_THROWS_AS(c.Validate(s), Error);
}

TEST_CASE("ranking list validation") {
  Lists(2, {{0, 1}, {2, 0}}).Validate(3);
  CHECK(CodeOf([] { Lists(2, {{0, 0}}).Validate(3); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([] { Lists(2, {{0, 3}}).Validate(3); }) == ErrorCode::kDimensionMismatch);

  const auto s = ScoreMatrix::Create(Matrix(2, 3, 0.5));
  CHECK(CodeOf([&] { ComputeUtilities(s, Lists(1, {{0}}), UtilityMode::kCtr); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(CodeOf([&] {
          ExpectedUtilities(s, RankingProbabilities{Matrix(2, 2, 0.5)}, UtilityMode::kCtr);
        }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("mode names") {
  CHECK(ParseUtilityMode("exposure") == UtilityMode::kExposure);
  CHECK(ParseUtilityMode("ctr") == UtilityMode::kCtr);
  CHECK(ToString(UtilityMode::kExposure) == "exposure");
  CHECK_THROWS_AS(ParseUtilityMode("clicks"), Error);
}
