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

#ifndef BCAST_MANIFEST_H_
#define BCAST_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bcast/catalog.h"
#include "bcast/segmenter.h"

namespace bcast::manifest {

using Json = nlohmann::ordered_json;

// Every file the tool writes starts with one of these, keyed "_header".
struct Header {
  std::string tool = "bcast";
  std::string version;
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
};

Json HeaderRecord(const Header &header);
bool IsHeader(const Json &record);

/// Parses one JSON object per line, skipping blank lines and header records.
std::vector<Json> ReadJsonl(const std::filesystem::path &path);

/// Single-writer, append-only line-delimited file. Holds an exclusive
/// advisory lock on the file for its lifetime.
class ManifestWriter {
 public:
  explicit ManifestWriter(const std::filesystem::path &path);
  ~ManifestWriter();
  ManifestWriter(const ManifestWriter &) = delete;
  ManifestWriter &operator=(const ManifestWriter &) = delete;

  void Append(const Json &record);
  void Flush();

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::string buffer_;
};

/// Rebuildable side index "<manifest>.idx": one "key<TAB>byte-offset" line
/// per record, where key is the record's `key_field`.
void BuildIndex(const std::filesystem::path &manifest, std::string_view key_field = "id");

class ManifestIndex {
 public:
  static ManifestIndex Load(const std::filesystem::path &manifest);

  bool Contains(const std::string &key) const { return offsets_.contains(key); }
  std::size_t size() const { return offsets_.size(); }
  /// Reads the record for `key` directly from the manifest.
  Json Lookup(const std::string &key) const;

 private:
  std::filesystem::path manifest_;
  std::map<std::string, std::uint64_t> offsets_;
};

// Record conversions.
Json ToJson(const seg::TranscriptSegment &segment);
seg::TranscriptSegment SegmentFromJson(const Json &record);

Json ToJson(const seg::Utterance &utterance, std::optional<seg::Stage> stage = std::nullopt);
seg::Utterance UtteranceFromJson(const Json &record);

Json ToJson(const catalog::BroadcastRecord &record);
catalog::BroadcastRecord RecordFromJson(const Json &record);

Json ToJson(const catalog::CorpusStats &stats);

}  // namespace bcast::manifest

#endif  // BCAST_MANIFEST_H_
