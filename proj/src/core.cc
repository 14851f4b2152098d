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

#include "taxrank/core.hpp"

#include <cmath>
#include <string>

#include "taxrank/error.hpp"

namespace taxrank {

std::string_view ToString(UtilityMode mode) {
  return mode == UtilityMode::kExposure ? "exposure" : "ctr";
}

UtilityMode ParseUtilityMode(std::string_view text) {
  if (text == "exposure") return UtilityMode::kExposure;
  if (text == "ctr") return UtilityMode::kCtr;
  Fail(ErrorCode::kInvalidArgument,
       "unknown mode '" + std::string(text) + "' (expected exposure or ctr)");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    Fail(ErrorCode::kDimensionMismatch,
         "matrix data has " + std::to_string(data_.size()) +
             " entries, expected " + std::to_string(rows) + "x" +
             std::to_string(cols));
  }
}

ScoreMatrix ScoreMatrix::Create(Matrix weights, std::vector<double> gamma,
                                std::optional<std::vector<double>> bids) {
  if (weights.rows() == 0 || weights.cols() == 0) {
    Fail(ErrorCode::kInvalidArgument, "score matrix must be non-empty");
  }
  if (gamma.size() != weights.cols()) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: gamma has " + std::to_string(gamma.size()) +
             " entries, weights have " + std::to_string(weights.cols()) +
             " columns");
  }
  for (std::size_t u = 0; u < weights.rows(); ++u) {
    for (std::size_t i = 0; i < weights.cols(); ++i) {
      const double w = weights(u, i);
      if (!std::isfinite(w) || w < 0.0) {
        Fail(ErrorCode::kInvalidArgument,
             "weight at user " + std::to_string(u) + ", item " +
                 std::to_string(i) + " must be finite and non-negative");
      }
    }
  }
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (!std::isfinite(gamma[i]) || gamma[i] <= 0.0) {
      Fail(ErrorCode::kInvalidArgument,
           "gamma for item " + std::to_string(i) + " must be positive");
    }
  }
  if (bids) {
    if (bids->size() != weights.cols()) {
      Fail(ErrorCode::kDimensionMismatch,
           "items axis: bids have " + std::to_string(bids->size()) +
               " entries, weights have " + std::to_string(weights.cols()) +
               " columns");
    }
    for (std::size_t i = 0; i < bids->size(); ++i) {
      if (!std::isfinite((*bids)[i]) || (*bids)[i] <= 0.0) {
        Fail(ErrorCode::kInvalidArgument,
             "bid for item " + std::to_string(i) + " must be positive");
      }
    }
  }
  return ScoreMatrix(std::move(weights), std::move(gamma), std::move(bids));
}

ScoreMatrix ScoreMatrix::Create(Matrix weights) {
  std::vector<double> gamma(weights.cols(), 1.0);
  return Create(std::move(weights), std::move(gamma));
}

void ScoreMatrix::ValidateFor(UtilityMode mode) const {
  if (mode != UtilityMode::kCtr) return;
  for (std::size_t u = 0; u < num_users(); ++u) {
    for (std::size_t i = 0; i < num_items(); ++i) {
      if (weights_(u, i) > 1.0) {
        Fail(ErrorCode::kInvalidArgument,
             "ctr weight at user " + std::to_string(u) + ", item " +
                 std::to_string(i) + " exceeds 1");
      }
    }
  }
}

void RankingConfig::Validate(const ScoreMatrix& scores) const {
  if (k < 1 || k > scores.num_items()) {
    Fail(ErrorCode::kInvalidArgument,
         "k must lie in [1, " + std::to_string(scores.num_items()) +
             "], got " + std::to_string(k));
  }
  if (!std::isfinite(tax_rate) || tax_rate < 0.0) {
    Fail(ErrorCode::kInvalidArgument, "tax rate must be >= 0");
  }
  if (!std::isfinite(lambda_ot) || lambda_ot <= 0.0) {
    Fail(ErrorCode::kInvalidArgument, "lambda_ot must be > 0");
  }
}

double ExposureVector::sum() const {
  double total = 0.0;
  for (double x : e) total += x;
  return total;
}

void RankingLists::Validate(std::size_t num_items) const {
  std::vector<char> seen(num_items, 0);
  for (std::size_t u = 0; u < num_users_; ++u) {
    const auto items = list(u);
    for (std::size_t item : items) {
      if (item >= num_items) {
        Fail(ErrorCode::kDimensionMismatch,
             "items axis: list of user " + std::to_string(u) +
                 " references item " + std::to_string(item) + " of " +
                 std::to_string(num_items));
      }
      if (seen[item]) {
        Fail(ErrorCode::kInvalidArgument,
             "list of user " + std::to_string(u) + " repeats item " +
                 std::to_string(item));
      }
      seen[item] = 1;
    }
    for (std::size_t item : items) seen[item] = 0;
  }
}

UtilityVector ComputeUtilities(const ScoreMatrix& scores,
                               const RankingLists& lists, UtilityMode mode) {
  if (lists.num_users() != scores.num_users()) {
    Fail(ErrorCode::kDimensionMismatch,
         "users axis: " + std::to_string(lists.num_users()) +
             " lists for " + std::to_string(scores.num_users()) + " users");
  }
  lists.Validate(scores.num_items());
  UtilityVector out{std::vector<double>(scores.num_items(), 0.0)};
  for (std::size_t u = 0; u < lists.num_users(); ++u) {
    for (std::size_t item : lists.list(u)) {
      out.v[item] += scores.utility_weight(u, item, mode);
    }
  }
  return out;
}

UtilityVector ExpectedUtilities(const ScoreMatrix& scores,
                                const RankingProbabilities& probs,
                                UtilityMode mode) {
  if (probs.x.rows() != scores.num_users()) {
    Fail(ErrorCode::kDimensionMismatch,
         "users axis: probabilities have " + std::to_string(probs.x.rows()) +
             " rows, scores have " + std::to_string(scores.num_users()));
  }
  if (probs.x.cols() != scores.num_items()) {
    Fail(ErrorCode::kDimensionMismatch,
         "items axis: probabilities have " + std::to_string(probs.x.cols()) +
             " columns, scores have " + std::to_string(scores.num_items()));
  }
  UtilityVector out{std::vector<double>(scores.num_items(), 0.0)};
  for (std::size_t u = 0; u < probs.x.rows(); ++u) {
    const auto row = probs.x.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out.v[i] += row[i] * scores.utility_weight(u, i, mode);
    }
  }
  return out;
}

}  // namespace taxrank
