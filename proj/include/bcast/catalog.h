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

#ifndef BCAST_CATALOG_H_
#define BCAST_CATALOG_H_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace bcast::catalog {

inline constexpr double kDefaultMaxDurationS = 3.0 * 3600.0;

struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date &) const = default;
  std::string ToString() const;
};

/// Parses YYYY-MM-DD.
Date ParseDate(std::string_view text);

struct BroadcastRecord {
  std::string id;
  std::string title;
  std::string summary;
  Date publication_date;
  std::string genre;
  double duration_s = 0.0;
  std::string media_path;

  bool operator==(const BroadcastRecord &) const = default;
};

/// Sort order expected by DedupConsecutive.
bool RecordLess(const BroadcastRecord &a, const BroadcastRecord &b);

/// With a non-empty allow set, keeps records whose genre is allowed;
/// otherwise drops records whose genre is denied.
std::vector<BroadcastRecord> FilterGenre(const std::vector<BroadcastRecord> &records,
                                         const std::set<std::string> &allow,
                                         const std::set<std::string> &deny);

/// Keeps records with duration_s <= max_s.
std::vector<BroadcastRecord> FilterDuration(const std::vector<BroadcastRecord> &records,
                                            double max_s = kDefaultMaxDurationS);

/// Keeps the first record of every maximal run sharing (title, summary,
/// publication date). Title and summary compare exactly after trimming.
/// Input must be sorted by (publication_date, id).
std::vector<BroadcastRecord> DedupConsecutive(const std::vector<BroadcastRecord> &records);

struct StatsItem {
  double duration_s = 0.0;
  std::string genre;
};

struct CorpusStats {
  bool empty = true;
  std::size_t utterance_count = 0;
  double total_seconds = 0.0;
  double total_hours = 0.0;
  double mean_duration_s = 0.0;
  double min_duration_s = 0.0;
  double max_duration_s = 0.0;
  std::map<std::string, double> hours_by_genre;
};

CorpusStats ComputeStats(const std::vector<StatsItem> &items);

/// Tab-separated catalog, one record per line, columns in the order
///   id, title, summary, publication_date, genre, duration_s, media_path
/// Blank lines and lines starting with '#' are skipped. A first line whose
/// first field is "id" is treated as a column header.
std::vector<BroadcastRecord> ReadTsv(const std::filesystem::path &path);

/// Reads either format: ".tsv" by extension, otherwise line-delimited JSON.
std::vector<BroadcastRecord> ReadCatalog(const std::filesystem::path &path);

}  // namespace bcast::catalog

#endif  // BCAST_CATALOG_H_
