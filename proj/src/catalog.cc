// Copyright 2026 The bcast Authors. All rights reserved.
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

#include "bcast/catalog.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "bcast/error.h"
#include "bcast/manifest.h"

namespace bcast::catalog {

namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

int ParseInt(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kParseError, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

bool IsLeap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int DaysIn(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && IsLeap(y) ? 29 : kDays[m - 1];
}

}  // namespace

std::string Date::ToString() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date ParseDate(std::string_view text) {
  text = Trim(text);
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::kParseError, "date '" + std::string(text) + "' is not YYYY-MM-DD");
  }
  Date d{ParseInt(text.substr(0, 4), "year"), ParseInt(text.substr(5, 2), "month"),
         ParseInt(text.substr(8, 2), "day")};
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > DaysIn(d.year, d.month)) {
    throw Error(ErrorCode::kParseError, "date '" + std::string(text) + "' does not exist");
  }
  return d;
}

bool RecordLess(const BroadcastRecord &a, const BroadcastRecord &b) {
  if (a.publication_date != b.publication_date) return a.publication_date < b.publication_date;
  return a.id < b.id;
}

std::vector<BroadcastRecord> FilterGenre(const std::vector<BroadcastRecord> &records,
                                         const std::set<std::string> &allow,
                                         const std::set<std::string> &deny) {
  for (const auto &g : allow) {
    if (deny.contains(g)) {
      throw Error(ErrorCode::kInvalidConfig, "genre '" + g + "' is both allowed and denied");
    }
  }
  std::vector<BroadcastRecord> out;
  for (const auto &r : records) {
    const bool keep = allow.empty() ? !deny.contains(r.genre) : allow.contains(r.genre);
    if (keep) out.push_back(r);
  }
  return out;
}

std::vector<BroadcastRecord> FilterDuration(const std::vector<BroadcastRecord> &records,
                                            double max_s) {
  if (!(max_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "max duration must be positive");
  std::vector<BroadcastRecord> out;
  for (const auto &r : records) {
    if (r.duration_s <= max_s) out.push_back(r);
  }
  return out;
}

std::vector<BroadcastRecord> DedupConsecutive(const std::vector<BroadcastRecord> &records) {
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (RecordLess(records[i], records[i - 1])) {
      throw Error(ErrorCode::kUnsortedInput, "catalog not sorted by (publication_date, id) at record " +
                                                 records[i].id);
    }
  }
  std::vector<BroadcastRecord> out;
  const BroadcastRecord *run_head = nullptr;
  for (const auto &r : records) {
    const bool same = run_head != nullptr && run_head->publication_date == r.publication_date &&
                      Trim(run_head->title) == Trim(r.title) &&
                      Trim(run_head->summary) == Trim(r.summary);
    if (!same) {
      out.push_back(r);
      run_head = &r;
    }
  }
  return out;
}

CorpusStats ComputeStats(const std::vector<StatsItem> &items) {
  CorpusStats stats;
  if (items.empty()) return stats;
  stats.empty = false;
  stats.utterance_count = items.size();
  stats.min_duration_s = std::numeric_limits<double>::infinity();
  stats.max_duration_s = -std::numeric_limits<double>::infinity();
  std::map<std::string, double> seconds_by_genre;
  for (const auto &item : items) {
    stats.total_seconds += item.duration_s;
    stats.min_duration_s = std::min(stats.min_duration_s, item.duration_s);
    stats.max_duration_s = std::max(stats.max_duration_s, item.duration_s);
    seconds_by_genre[item.genre] += item.duration_s;
  }
  stats.total_hours = stats.total_seconds / 3600.0;
  stats.mean_duration_s = stats.total_seconds / static_cast<double>(items.size());
  // Clamp against rounding.
  stats.mean_duration_s = std::clamp(stats.mean_duration_s, stats.min_duration_s, stats.max_duration_s);
  for (const auto &[genre, seconds] : seconds_by_genre) stats.hours_by_genre[genre] = seconds / 3600.0;
  return stats;
}

std::vector<BroadcastRecord> ReadTsv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::vector<BroadcastRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (records.empty() && Trim(fields[0]) == "id") continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (fields.size() != 7) {
      throw Error(ErrorCode::kParseError,
                  where + ": expected 7 tab-separated fields, got " + std::to_string(fields.size()));
    }
    BroadcastRecord r;
    r.id = std::string(Trim(fields[0]));
    r.title = std::string(fields[1]);
    r.summary = std::string(fields[2]);
    try {
      r.publication_date = ParseDate(fields[3]);
    } catch (const Error &e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
    r.genre = std::string(Trim(fields[4]));
    std::string_view dur = Trim(fields[5]);
    auto [ptr, ec] = std::from_chars(dur.data(), dur.data() + dur.size(), r.duration_s);
    if (ec != std::errc() || ptr != dur.data() + dur.size() || !std::isfinite(r.duration_s) ||
        r.duration_s <= 0.0) {
      throw Error(ErrorCode::kParseError, where + ": bad duration '" + std::string(dur) + "'");
    }
    r.media_path = std::string(Trim(fields[6]));
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BroadcastRecord> ReadCatalog(const std::filesystem::path &path) {
  if (path.extension() == ".tsv") return ReadTsv(path);
  std::vector<BroadcastRecord> records;
  for (const auto &j : manifest::ReadJsonl(path)) records.push_back(manifest::RecordFromJson(j));
  return records;
}

}  // namespace bcast::catalog
