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

// CSV ingestion and persistence.
//
// All files are UTF-8 with '\n' line endings and a mandatory header row.
// Fields are separated by commas and are never quoted, so ids must not
// contain commas. Numbers are written with std::to_chars and read with
// std::from_chars, which ignore the process locale.
//
//   dense scores   header: item ids; then one row of weights per user
//   triplets       user_id,item_id,score  (unlisted pairs score 0)
//   bids           item_id,bid
//   id map         axis,index,id          (axis is "user" or "item")
//   lists          user_id,rank,item_id   (rank starts at 1)
//   probabilities  same layout as dense scores, 12 significant digits
//   trade-off      t,ecn,ecpm,gini,pot[,pot_bound]

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taxrank/core.hpp"

namespace taxrank::io {

enum class ScoreFormat { kDense, kTriplet };

ScoreFormat ParseScoreFormat(std::string_view text);

// External ids of users and items, by dense index.
struct IdMap {
  std::vector<std::string> users;
  std::vector<std::string> items;
};

// Ids "0".."n-1" on both axes.
IdMap DefaultIds(std::size_t num_users, std::size_t num_items);

struct ScoreData {
  ScoreMatrix scores;
  IdMap ids;
};

// Dense files name users by row number. Triplet ids are remapped in order of
// first appearance. In ctr mode every score must lie in [0, 1].
ScoreData LoadScores(const std::filesystem::path& path, ScoreFormat format,
                     UtilityMode mode);

// Bids aligned to ids.items; every item needs exactly one positive bid.
std::vector<double> LoadBids(const std::filesystem::path& path, const IdMap& ids);

// Attaches bids and, unless unit_gamma is set, gamma_i = ln(bid_i).
ScoreData WithBids(const ScoreData& data, std::vector<double> bids,
                   bool unit_gamma);

// Shortest round-trip representation, so a reload is bitwise identical.
void SaveScoresDense(const ScoreData& data, const std::filesystem::path& path);
void SaveIdMap(const IdMap& ids, const std::filesystem::path& path);
IdMap LoadIdMap(const std::filesystem::path& path);

void SaveLists(const RankingLists& lists, const IdMap& ids,
               const std::filesystem::path& path);
RankingLists LoadLists(const std::filesystem::path& path, const IdMap& ids);

void SaveProbabilities(const RankingProbabilities& probs, const IdMap& ids,
                       const std::filesystem::path& path);
RankingProbabilities LoadProbabilities(const std::filesystem::path& path);

// pot_bound, when given, adds a sixth column of the same length as points.
void SaveTradeoff(std::span<const TradeoffPoint> points,
                  const std::filesystem::path& path,
                  std::optional<std::span<const double>> pot_bound = {});

// Generic report table: header row then one line per row, fields verbatim.
void SaveTable(const std::filesystem::path& path,
               std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows);

// Locale-independent decimal text with `significant` digits.
std::string FormatNumber(double value, int significant = 12);
std::string FormatShortest(double value);

}  // namespace taxrank::io
