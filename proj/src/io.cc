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

#include "taxrank/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "taxrank/error.hpp"

namespace taxrank::io {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

class CsvReader {
 public:
  explicit CsvReader(const std::filesystem::path& path) : path_(path), in_(path) {
    if (!in_) Fail(ErrorCode::kIo, "cannot open " + path.string());
  }

  // Skips blank lines. Returned views stay valid until the next call.
  bool Next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_number_;
      if (Trim(line_).empty()) continue;
      fields.clear();
      std::string_view rest(line_);
      while (true) {
        const auto comma = rest.find(',');
        fields.push_back(Trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      return true;
    }
    if (in_.bad()) Fail(ErrorCode::kIo, "read error in " + path_.string());
    return false;
  }

  [[noreturn]] void Malformed(const std::string& what) const {
    Fail(ErrorCode::kInvalidArgument, path_.string() + ":" +
                                          std::to_string(line_number_) + ": " +
                                          what);
  }

  double Number(std::string_view field) const {
    double value = 0.0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
      Malformed("not a number: '" + std::string(field) + "'");
    }
    return value;
  }

  std::size_t Count(std::string_view field) const {
    std::size_t value = 0;
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (field.empty() || ec != std::errc() || ptr != end) {
      Malformed("not a count: '" + std::string(field) + "'");
    }
    return value;
  }

  void ExpectFields(const std::vector<std::string_view>& fields,
                    std::size_t expected) const {
    if (fields.size() != expected) {
      Malformed("expected " + std::to_string(expected) + " fields, found " +
                std::to_string(fields.size()));
    }
  }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
  std::string line_;
  std::size_t line_number_ = 0;
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path)
      : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) Fail(ErrorCode::kIo, "cannot write " + path.string());
  }

  std::ofstream& stream() { return out_; }

  void Close() {
    out_.close();
    if (!out_) Fail(ErrorCode::kIo, "write failed for " + path_.string());
  }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

std::unordered_map<std::string, std::size_t> IndexOf(
    const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);
  return index;
}

void WriteDense(std::ofstream& out, const IdMap& ids, const Matrix& m,
                bool shortest) {
  for (std::size_t i = 0; i < ids.items.size(); ++i) {
    out << (i ? "," : "") << ids.items[i];
  }
  out << '\n';
  for (std::size_t u = 0; u < m.rows(); ++u) {
    const auto row = m.row(u);
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << (shortest ? FormatShortest(row[i]) : FormatNumber(row[i]));
    }
    out << '\n';
  }
}

ScoreData LoadDense(const std::filesystem::path& path, UtilityMode mode) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  IdMap ids;
  std::unordered_set<std::string> seen;
  for (auto f : fields) {
    if (f.empty()) reader.Malformed("empty item id in header");
    if (!seen.emplace(f).second) reader.Malformed("duplicate item id '" + std::string(f) + "'");
    ids.items.emplace_back(f);
  }
  std::vector<double> data;
  std::size_t users = 0;
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, ids.items.size());
    for (auto f : fields) {
      const double w = reader.Number(f);
      if (w < 0.0 || (mode == UtilityMode::kCtr && w > 1.0)) {
        reader.Malformed("score " + std::string(f) + " outside the allowed range");
      }
      data.push_back(w);
    }
    ids.users.push_back(std::to_string(users));
    ++users;
  }
  if (users == 0) reader.Malformed("no user rows");
  Matrix w(users, ids.items.size(), std::move(data));
  return ScoreData{ScoreMatrix::Create(std::move(w)), std::move(ids)};
}

ScoreData LoadTriplets(const std::filesystem::path& path, UtilityMode mode) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  reader.ExpectFields(fields, 3);

  IdMap ids;
  std::unordered_map<std::string, std::size_t> user_index;
  std::unordered_map<std::string, std::size_t> item_index;
  struct Entry {
    std::size_t user, item;
    double score;
  };
  std::vector<Entry> entries;
  std::unordered_set<std::uint64_t> pairs;
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, 3);
    if (fields[0].empty() || fields[1].empty()) reader.Malformed("empty id");
    auto [u, new_user] = user_index.try_emplace(std::string(fields[0]), ids.users.size());
    if (new_user) ids.users.emplace_back(fields[0]);
    auto [i, new_item] = item_index.try_emplace(std::string(fields[1]), ids.items.size());
    if (new_item) ids.items.emplace_back(fields[1]);
    const double score = reader.Number(fields[2]);
    if (score < 0.0 || (mode == UtilityMode::kCtr && score > 1.0)) {
      reader.Malformed("score " + std::string(fields[2]) + " outside the allowed range");
    }
    const std::uint64_t key = (static_cast<std::uint64_t>(u->second) << 32) | i->second;
    if (!pairs.insert(key).second) {
      reader.Malformed("duplicate triplet for user '" + std::string(fields[0]) +
                       "', item '" + std::string(fields[1]) + "'");
    }
    entries.push_back({u->second, i->second, score});
  }
  if (entries.empty()) reader.Malformed("no triplets");
  Matrix w(ids.users.size(), ids.items.size());
  for (const auto& e : entries) w(e.user, e.item) = e.score;
  return ScoreData{ScoreMatrix::Create(std::move(w)), std::move(ids)};
}

}  // namespace

IdMap DefaultIds(std::size_t num_users, std::size_t num_items) {
  IdMap ids;
  for (std::size_t u = 0; u < num_users; ++u) ids.users.push_back(std::to_string(u));
  for (std::size_t i = 0; i < num_items; ++i) ids.items.push_back(std::to_string(i));
  return ids;
}

ScoreFormat ParseScoreFormat(std::string_view text) {
  if (text == "dense") return ScoreFormat::kDense;
  if (text == "triplet") return ScoreFormat::kTriplet;
  Fail(ErrorCode::kInvalidArgument,
       "unknown score format '" + std::string(text) + "' (expected dense or triplet)");
}

ScoreData LoadScores(const std::filesystem::path& path, ScoreFormat format,
                     UtilityMode mode) {
  return format == ScoreFormat::kDense ? LoadDense(path, mode)
                                       : LoadTriplets(path, mode);
}

std::vector<double> LoadBids(const std::filesystem::path& path, const IdMap& ids) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  reader.ExpectFields(fields, 2);
  const auto index = IndexOf(ids.items);
  std::vector<double> bids(ids.items.size(), 0.0);
  std::vector<char> have(ids.items.size(), 0);
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, 2);
    const auto it = index.find(std::string(fields[0]));
    if (it == index.end()) reader.Malformed("unknown item id '" + std::string(fields[0]) + "'");
    const double bid = reader.Number(fields[1]);
    if (bid <= 0.0) reader.Malformed("bid must be positive");
    if (have[it->second]) reader.Malformed("duplicate bid for item '" + std::string(fields[0]) + "'");
    have[it->second] = 1;
    bids[it->second] = bid;
  }
  for (std::size_t i = 0; i < have.size(); ++i) {
    if (!have[i]) {
      Fail(ErrorCode::kInvalidArgument,
           path.string() + ": no bid for item '" + ids.items[i] + "'");
    }
  }
  return bids;
}

ScoreData WithBids(const ScoreData& data, std::vector<double> bids,
                   bool unit_gamma) {
  std::vector<double> gamma(bids.size(), 1.0);
  if (!unit_gamma) {
    bool zero = false;
    bool negative = false;
    for (std::size_t i = 0; i < bids.size(); ++i) {
      gamma[i] = std::log(bids[i]);
      zero |= gamma[i] == 0.0;
      negative |= gamma[i] < 0.0;
    }
    if (zero) {
      Fail(ErrorCode::kInvalidArgument,
           "log-bid weights are zero; supply gamma override");
    }
    if (negative) {
      Fail(ErrorCode::kInvalidArgument,
           "log-bid weights are negative; supply gamma override");
    }
  }
  return ScoreData{ScoreMatrix::Create(data.scores.weights(), std::move(gamma),
                                       std::move(bids)),
                   data.ids};
}

void SaveScoresDense(const ScoreData& data, const std::filesystem::path& path) {
  CsvWriter writer(path);
  WriteDense(writer.stream(), data.ids, data.scores.weights(), true);
  writer.Close();
}

void SaveIdMap(const IdMap& ids, const std::filesystem::path& path) {
  CsvWriter writer(path);
  auto& out = writer.stream();
  out << "axis,index,id\n";
  for (std::size_t u = 0; u < ids.users.size(); ++u) out << "user," << u << ',' << ids.users[u] << '\n';
  for (std::size_t i = 0; i < ids.items.size(); ++i) out << "item," << i << ',' << ids.items[i] << '\n';
  writer.Close();
}

IdMap LoadIdMap(const std::filesystem::path& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  IdMap ids;
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, 3);
    if (fields[0] != "user" && fields[0] != "item") reader.Malformed("unknown axis");
    auto& axis = fields[0] == "user" ? ids.users : ids.items;
    if (reader.Count(fields[1]) != axis.size()) reader.Malformed("indices must be consecutive");
    axis.emplace_back(fields[2]);
  }
  return ids;
}

void SaveLists(const RankingLists& lists, const IdMap& ids,
               const std::filesystem::path& path) {
  if (ids.users.size() != lists.num_users()) {
    Fail(ErrorCode::kDimensionMismatch, "users axis: id map does not match lists");
  }
  lists.Validate(ids.items.size());
  CsvWriter writer(path);
  auto& out = writer.stream();
  out << "user_id,rank,item_id\n";
  for (std::size_t u = 0; u < lists.num_users(); ++u) {
    const auto list = lists.list(u);
    for (std::size_t r = 0; r < list.size(); ++r) {
      out << ids.users[u] << ',' << r + 1 << ',' << ids.items[list[r]] << '\n';
    }
  }
  writer.Close();
}

RankingLists LoadLists(const std::filesystem::path& path, const IdMap& ids) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  reader.ExpectFields(fields, 3);
  const auto users = IndexOf(ids.users);
  const auto items = IndexOf(ids.items);
  std::vector<std::map<std::size_t, std::size_t>> ranked(ids.users.size());
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, 3);
    const auto u = users.find(std::string(fields[0]));
    if (u == users.end()) reader.Malformed("unknown user id '" + std::string(fields[0]) + "'");
    const std::size_t rank = reader.Count(fields[1]);
    const auto i = items.find(std::string(fields[2]));
    if (i == items.end()) reader.Malformed("unknown item id '" + std::string(fields[2]) + "'");
    if (!ranked[u->second].emplace(rank, i->second).second) {
      reader.Malformed("duplicate rank for user '" + std::string(fields[0]) + "'");
    }
  }
  if (ranked.empty() || ranked[0].empty()) {
    Fail(ErrorCode::kInvalidArgument, path.string() + ": no lists");
  }
  const std::size_t k = ranked[0].size();
  RankingLists lists(ids.users.size(), k);
  for (std::size_t u = 0; u < ranked.size(); ++u) {
    if (ranked[u].size() != k) {
      Fail(ErrorCode::kInvalidArgument,
           path.string() + ": user '" + ids.users[u] + "' has " +
               std::to_string(ranked[u].size()) + " items, expected " +
               std::to_string(k));
    }
    std::size_t expected_rank = 1;
    auto out = lists.list(u);
    for (const auto& [rank, item] : ranked[u]) {
      if (rank != expected_rank) {
        Fail(ErrorCode::kInvalidArgument,
             path.string() + ": ranks of user '" + ids.users[u] +
                 "' must run 1.." + std::to_string(k));
      }
      out[expected_rank - 1] = item;
      ++expected_rank;
    }
  }
  lists.Validate(ids.items.size());
  return lists;
}

void SaveProbabilities(const RankingProbabilities& probs, const IdMap& ids,
                       const std::filesystem::path& path) {
  if (ids.items.size() != probs.x.cols()) {
    Fail(ErrorCode::kDimensionMismatch, "items axis: id map does not match probabilities");
  }
  CsvWriter writer(path);
  WriteDense(writer.stream(), ids, probs.x, false);
  writer.Close();
}

RankingProbabilities LoadProbabilities(const std::filesystem::path& path) {
  CsvReader reader(path);
  std::vector<std::string_view> fields;
  if (!reader.Next(fields)) reader.Malformed("missing header row");
  const std::size_t cols = fields.size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (reader.Next(fields)) {
    reader.ExpectFields(fields, cols);
    for (auto f : fields) data.push_back(reader.Number(f));
    ++rows;
  }
  return RankingProbabilities{Matrix(rows, cols, std::move(data))};
}

void SaveTradeoff(std::span<const TradeoffPoint> points,
                  const std::filesystem::path& path,
                  std::optional<std::span<const double>> pot_bound) {
  if (pot_bound && pot_bound->size() != points.size()) {
    Fail(ErrorCode::kDimensionMismatch, "pot_bound column length mismatch");
  }
  CsvWriter writer(path);
  auto& out = writer.stream();
  out << "t,ecn,ecpm,gini,pot" << (pot_bound ? ",pot_bound" : "") << '\n';
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto& p = points[j];
    out << FormatNumber(p.tax_rate) << ',' << FormatNumber(p.ecn) << ','
        << (p.ecpm ? FormatNumber(*p.ecpm) : "") << ',' << FormatNumber(p.gini)
        << ',' << FormatNumber(p.pot);
    if (pot_bound) out << ',' << FormatNumber((*pot_bound)[j]);
    out << '\n';
  }
  writer.Close();
}

void SaveTable(const std::filesystem::path& path,
               std::span<const std::string> header,
               std::span<const std::vector<std::string>> rows) {
  CsvWriter writer(path);
  auto& out = writer.stream();
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      Fail(ErrorCode::kInternal, "report row width does not match header");
    }
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  writer.Close();
}

std::string FormatNumber(double value, int significant) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, significant);
  if (ec != std::errc()) Fail(ErrorCode::kInternal, "number formatting failed");
  return std::string(buf, ptr);
}

std::string FormatShortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) Fail(ErrorCode::kInternal, "number formatting failed");
  return std::string(buf, ptr);
}

}  // namespace taxrank::io
