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

#include "bcast/manifest.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <sstream>

#include "bcast/error.h"

namespace bcast::manifest {

namespace {

template <class T>
T Field(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::kParseError, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception &) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' has the wrong type");
  }
}

std::optional<std::string> OptionalString(const Json &j, const char *key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::kParseError, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

Json HeaderRecord(const Header &header) {
  Json h;
  h["tool"] = header.tool;
  h["version"] = header.version;
  h["command"] = header.command;
  h["config_hash"] = header.config_hash;
  h["seed"] = header.seed;
  Json record;
  record["_header"] = std::move(h);
  return record;
}

bool IsHeader(const Json &record) { return record.is_object() && record.contains("_header"); }

std::vector<Json> ReadJsonl(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::vector<Json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": record is not an object");
    }
    if (!IsHeader(j)) out.push_back(std::move(j));
  }
  return out;
}

ManifestWriter::ManifestWriter(const std::filesystem::path &path) : path_(path) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string() + ": " + std::strerror(errno));
  }
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::kIoError, path.string() + " is locked by another writer");
  }
}

ManifestWriter::~ManifestWriter() {
  try {
    Flush();
  } catch (...) {
  }
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void ManifestWriter::Append(const Json &record) {
  buffer_ += record.dump();
  buffer_.push_back('\n');
  if (buffer_.size() > (1 << 16)) Flush();
}

void ManifestWriter::Flush() {
  std::size_t done = 0;
  while (done < buffer_.size()) {
    ssize_t n = ::write(fd_, buffer_.data() + done, buffer_.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIoError, "write to " + path_.string() + " failed");
    }
    done += static_cast<std::size_t>(n);
  }
  buffer_.clear();
}

void BuildIndex(const std::filesystem::path &manifest, std::string_view key_field) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + manifest.string());
  std::ostringstream index;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    const std::uint64_t line_start = offset;
    offset += line.size() + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || IsHeader(j)) continue;
    auto it = j.find(key_field);
    if (it == j.end() || !it->is_string()) continue;
    index << it->get<std::string>() << '\t' << line_start << '\n';
  }
  std::filesystem::path idx = manifest;
  idx += ".idx";
  std::ofstream out(idx, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + idx.string());
  out << index.str();
}

ManifestIndex ManifestIndex::Load(const std::filesystem::path &manifest) {
  std::filesystem::path idx = manifest;
  idx += ".idx";
  std::ifstream in(idx);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + idx.string());
  ManifestIndex index;
  index.manifest_ = manifest;
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw Error(ErrorCode::kParseError, "malformed index line in " + idx.string());
    index.offsets_[line.substr(0, tab)] = std::stoull(line.substr(tab + 1));
  }
  return index;
}

Json ManifestIndex::Lookup(const std::string &key) const {
  auto it = offsets_.find(key);
  if (it == offsets_.end()) throw Error(ErrorCode::kOutOfRange, "no record '" + key + "'");
  std::ifstream in(manifest_, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + manifest_.string());
  in.seekg(static_cast<std::streamoff>(it->second));
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIoError, "stale index for " + manifest_.string());
  return Json::parse(line);
}

Json ToJson(const seg::TranscriptSegment &s) {
  Json j;
  j["media_id"] = s.media_id;
  j["start_s"] = s.start_s;
  j["end_s"] = s.end_s;
  j["text"] = s.text;
  if (s.speaker) j["speaker"] = *s.speaker;
  j["stage"] = seg::StageName(s.stage);
  return j;
}

seg::TranscriptSegment SegmentFromJson(const Json &j) {
  seg::TranscriptSegment s;
  s.media_id = Field<std::string>(j, "media_id");
  s.start_s = Field<double>(j, "start_s");
  s.end_s = Field<double>(j, "end_s");
  s.text = Field<std::string>(j, "text");
  s.speaker = OptionalString(j, "speaker");
  s.stage = seg::ParseStage(Field<std::string>(j, "stage"));
  return s;
}

Json ToJson(const seg::Utterance &u, std::optional<seg::Stage> stage) {
  Json j;
  j["id"] = u.id;
  j["media_id"] = u.media_id;
  j["start_s"] = u.start_s;
  j["end_s"] = u.end_s;
  j["duration"] = u.duration_s();
  j["text"] = u.text;
  if (u.speaker) j["speaker"] = *u.speaker;
  if (stage) j["stage"] = seg::StageName(*stage);
  return j;
}

seg::Utterance UtteranceFromJson(const Json &j) {
  seg::Utterance u;
  u.id = Field<std::string>(j, "id");
  u.media_id = Field<std::string>(j, "media_id");
  u.start_s = Field<double>(j, "start_s");
  u.end_s = Field<double>(j, "end_s");
  u.text = Field<std::string>(j, "text");
  u.speaker = OptionalString(j, "speaker");
  return u;
}

Json ToJson(const catalog::BroadcastRecord &r) {
  Json j;
  j["id"] = r.id;
  j["title"] = r.title;
  j["summary"] = r.summary;
  j["publication_date"] = r.publication_date.ToString();
  j["genre"] = r.genre;
  j["duration_s"] = r.duration_s;
  j["media_path"] = r.media_path;
  return j;
}

catalog::BroadcastRecord RecordFromJson(const Json &j) {
  catalog::BroadcastRecord r;
  r.id = Field<std::string>(j, "id");
  r.title = Field<std::string>(j, "title");
  r.summary = Field<std::string>(j, "summary");
  r.publication_date = catalog::ParseDate(Field<std::string>(j, "publication_date"));
  r.genre = Field<std::string>(j, "genre");
  r.duration_s = Field<double>(j, "duration_s");
  if (!(r.duration_s > 0.0)) throw Error(ErrorCode::kParseError, "record " + r.id + " has non-positive duration");
  r.media_path = Field<std::string>(j, "media_path");
  return r;
}

Json ToJson(const catalog::CorpusStats &stats) {
  Json j;
  j["empty"] = stats.empty;
  j["utterance_count"] = stats.utterance_count;
  j["total_seconds"] = stats.total_seconds;
  j["total_hours"] = stats.total_hours;
  j["mean_duration_s"] = stats.mean_duration_s;
  j["min_duration_s"] = stats.min_duration_s;
  j["max_duration_s"] = stats.max_duration_s;
  Json genres = Json::object();
  for (const auto &[genre, hours] : stats.hours_by_genre) genres[genre] = hours;
  j["hours_by_genre"] = std::move(genres);
  return j;
}

}  // namespace bcast::manifest
