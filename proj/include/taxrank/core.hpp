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

// Domain types shared by the ranking pipeline.
//
// Users index rows and items index columns everywhere. A ranking list of size
// K for user u is the set of items the user is shown; the utility of an item
// is accumulated over all lists it appears in, weighted either by 1 (exposure
// accounting) or by the user-item relevance weight (click accounting).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace taxrank {

enum class UtilityMode { kExposure, kCtr };

std::string_view ToString(UtilityMode mode);
// Accepts "exposure" or "ctr".
UtilityMode ParseUtilityMode(std::string_view text);

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// User-item relevance weights w, per-item weights gamma and optional bids.
// Immutable once built; Create() enforces the invariants.
class ScoreMatrix {
 public:
  static ScoreMatrix Create(Matrix weights, std::vector<double> gamma,
                            std::optional<std::vector<double>> bids = {});
  // Unit gamma, no bids.
  static ScoreMatrix Create(Matrix weights);

  std::size_t num_users() const { return weights_.rows(); }
  std::size_t num_items() const { return weights_.cols(); }

  double weight(std::size_t user, std::size_t item) const {
    return weights_(user, item);
  }
  // gamma_i * w_{u,i}
  double score(std::size_t user, std::size_t item) const {
    return gamma_[item] * weights_(user, item);
  }

  const Matrix& weights() const { return weights_; }
  const std::vector<double>& gamma() const { return gamma_; }
  const std::optional<std::vector<double>>& bids() const { return bids_; }

  // CTR weights are probabilities and must not exceed 1.
  void ValidateFor(UtilityMode mode) const;

  // Weight a selection of (user, item) contributes to the item's utility.
  double utility_weight(std::size_t user, std::size_t item,
                        UtilityMode mode) const {
    return mode == UtilityMode::kExposure ? 1.0 : weights_(user, item);
  }

 private:
  ScoreMatrix(Matrix weights, std::vector<double> gamma,
              std::optional<std::vector<double>> bids)
      : weights_(std::move(weights)),
        gamma_(std::move(gamma)),
        bids_(std::move(bids)) {}

  Matrix weights_;
  std::vector<double> gamma_;
  std::optional<std::vector<double>> bids_;
};

struct RankingConfig {
  std::size_t k = 10;
  double tax_rate = 0.0;
  double lambda_ot = 0.1;
  std::uint64_t seed = 0;
  UtilityMode mode = UtilityMode::kCtr;

  void Validate(const ScoreMatrix& scores) const;
};

// Relaxed per-user exposure share of every item; sums to K.
struct ExposureVector {
  std::vector<double> e;

  double sum() const;
};

// Marginal inclusion probability of each item in each user's list.
struct RankingProbabilities {
  Matrix x;
};

// Per-user lists of K distinct items stored contiguously.
class RankingLists {
 public:
  RankingLists(std::size_t num_users, std::size_t k)
      : num_users_(num_users), k_(k), items_(num_users * k, 0) {}

  std::size_t num_users() const { return num_users_; }
  std::size_t k() const { return k_; }

  std::span<const std::size_t> list(std::size_t user) const {
    return {items_.data() + user * k_, k_};
  }
  std::span<std::size_t> list(std::size_t user) {
    return {items_.data() + user * k_, k_};
  }

  // Checks cardinality, distinctness and item range.
  void Validate(std::size_t num_items) const;

  friend bool operator==(const RankingLists&, const RankingLists&) = default;

 private:
  std::size_t num_users_;
  std::size_t k_;
  std::vector<std::size_t> items_;
};

struct UtilityVector {
  std::vector<double> v;
};

struct TradeoffPoint {
  double tax_rate = 0.0;
  double ecn = 0.0;
  std::optional<double> ecpm;
  double gini = 0.0;
  double pot = 0.0;
};

// v_i = sum over users whose list contains i of the mode's utility weight.
UtilityVector ComputeUtilities(const ScoreMatrix& scores,
                               const RankingLists& lists, UtilityMode mode);

// Expectation of ComputeUtilities when lists are drawn with marginals x.
UtilityVector ExpectedUtilities(const ScoreMatrix& scores,
                                const RankingProbabilities& probs,
                                UtilityMode mode);

}  // namespace taxrank
