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

#include "bcast/pipeline.h"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "bcast/audio.h"
#include "bcast/batcher.h"
#include "bcast/catalog.h"
#include "bcast/error.h"
#include "bcast/segmenter.h"
#include "bcast/textnorm.h"

namespace bcast::pipeline {

using manifest::Json;

namespace {

// Stages outputs next to their final location and moves them into place on
// Commit(). Anything not committed is deleted on destruction.
class OutputSet {
 public:
  OutputSet() = default;
  OutputSet(const OutputSet &) = delete;
  OutputSet &operator=(const OutputSet &) = delete;

  ~OutputSet() {
    if (committed_) return;
    for (const auto &[tmp, final_path] : entries_) {
      std::error_code ec;
      fs::remove_all(tmp, ec);
    }
  }

  fs::path Stage(const fs::path &final_path) {
    fs::path tmp = final_path;
    tmp += ".tmp";
    fs::remove_all(tmp);
    entries_.emplace_back(tmp, final_path);
    return tmp;
  }

  void Commit() {
    for (const auto &[tmp, final_path] : entries_) {
      fs::remove_all(final_path);
      fs::rename(tmp, final_path);
    }
    committed_ = true;
  }

 private:
  std::vector<std::pair<fs::path, fs::path>> entries_;
  bool committed_ = false;
};

template <class Fn>
void ParallelFor(std::size_t n, int workers, Fn &&fn) {
  const std::size_t threads = std::min<std::size_t>(std::max(workers, 1), n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto &th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

manifest::Header MakeHeader(const PipelineConfig &config, const std::string &command) {
  manifest::Header h;
  h.version = ToolVersion();
  h.command = command;
  h.config_hash = ConfigHash(config, command);
  h.seed = config.seed;
  return h;
}

void WriteJsonFile(const fs::path &path, const Json &value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << value.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

Json WithHeader(const manifest::Header &header, Json body) {
  Json out = manifest::HeaderRecord(header);
  for (auto &[key, value] : body.items()) out[key] = std::move(value);
  return out;
}

[[noreturn]] void ConfigError(const std::string &what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

void CheckKeys(const nlohmann::json &j, const std::string &where,
               std::initializer_list<const char *> allowed) {
  if (!j.is_object()) ConfigError(where + " must be an object");
  for (const auto &[key, value] : j.items()) {
    bool ok = false;
    for (const char *a : allowed) ok = ok || key == a;
    if (!ok) ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T Get(const nlohmann::json &j, const char *key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception &) {
    ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

fs::path Resolve(const fs::path &base, const std::string &p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

fs::path Out(const PipelineConfig &config, const char *name) { return config.output_dir / name; }

std::vector<catalog::BroadcastRecord> LoadFilteredCatalog(const PipelineConfig &config) {
  const fs::path path = Out(config, kCatalogOut);
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kUnreadableFile, path.string() + " not found; run catalog-filter first");
  }
  return catalog::ReadCatalog(path);
}

fs::path MediaPath(const PipelineConfig &config, const catalog::BroadcastRecord &record) {
  return Resolve(config.catalog.parent_path(), record.media_path);
}

// Latest utterance manifest produced by the chain, newest stage first.
fs::path LatestUtteranceManifest(const PipelineConfig &config,
                                 std::initializer_list<const char *> candidates) {
  for (const char *name : candidates) {
    fs::path p = Out(config, name);
    if (fs::exists(p)) return p;
  }
  throw Error(ErrorCode::kUnreadableFile,
              "no utterance manifest in " + config.output_dir.string() + "; run segment first");
}

double TotalHours(const std::vector<catalog::BroadcastRecord> &records) {
  double s = 0.0;
  for (const auto &r : records) s += r.duration_s;
  return s / 3600.0;
}

}  // namespace

std::string ToolVersion() { return BCAST_VERSION; }

std::string Sha256Hex(const std::string &data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string ConfigHash(const PipelineConfig &config, const std::string &command) {
  return Sha256Hex(config.canonical + "\n" + command);
}

int EffectiveWorkers(const PipelineConfig &config) {
  if (const char *env = std::getenv("BCAST_WORKERS"); env != nullptr && *env != '\0') {
    char *end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 1024) {
      ConfigError(std::string("BCAST_WORKERS must be an integer in [1, 1024], got '") + env + "'");
    }
    return static_cast<int>(v);
  }
  return config.workers;
}

sched::Schedule ScheduleFromJson(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("kind")) ConfigError("schedule entries need a 'kind'");
  const std::string kind = Get<std::string>(j, "kind", "");

  std::optional<double> scaled_peak;
  if (auto it = j.find("peak_lr_from_batch"); it != j.end()) {
    CheckKeys(*it, "peak_lr_from_batch", {"reference_lr", "reference_minutes", "minutes", "sample_rate"});
    const int sr = Get<int>(*it, "sample_rate", 16000);
    const double ref_lr = Get<double>(*it, "reference_lr", 0.0);
    const auto ref_tokens = sched::TokensOf(Get<double>(*it, "reference_minutes", 0.0), sr);
    const auto new_tokens = sched::TokensOf(Get<double>(*it, "minutes", 0.0), sr);
    scaled_peak = sched::SqrtScale(ref_lr, static_cast<double>(ref_tokens), static_cast<double>(new_tokens));
  }

  sched::Schedule schedule;
  if (kind == "triangular") {
    CheckKeys(j, "triangular schedule",
              {"kind", "peak_lr", "peak_lr_from_batch", "steps_up", "steps_down", "total_steps", "min_ratio", "stride"});
    sched::Triangular t;
    t.peak_lr = scaled_peak.value_or(Get<double>(j, "peak_lr", t.peak_lr));
    if (j.contains("total_steps")) {
      const auto total = Get<std::int64_t>(j, "total_steps", 0);
      t.steps_up = Get<std::int64_t>(j, "steps_up", total / 2);
      t.steps_down = total - t.steps_up;
    } else {
      t.steps_up = Get<std::int64_t>(j, "steps_up", t.steps_up);
      t.steps_down = Get<std::int64_t>(j, "steps_down", t.steps_down);
    }
    t.min_ratio = Get<double>(j, "min_ratio", t.min_ratio);
    schedule = t;
  } else if (kind == "two-stage") {
    CheckKeys(j, "two-stage schedule",
              {"kind", "peak_lr", "peak_lr_from_batch", "total_steps", "warmup_fraction", "init_ratio", "final_ratio", "stride"});
    sched::TwoStage t;
    t.peak_lr = scaled_peak.value_or(Get<double>(j, "peak_lr", t.peak_lr));
    t.total_steps = Get<std::int64_t>(j, "total_steps", t.total_steps);
    t.warmup_fraction = Get<double>(j, "warmup_fraction", t.warmup_fraction);
    t.init_ratio = Get<double>(j, "init_ratio", t.init_ratio);
    t.final_ratio = Get<double>(j, "final_ratio", t.final_ratio);
    schedule = t;
  } else if (kind == "tri-stage") {
    CheckKeys(j, "tri-stage schedule",
              {"kind", "init_lr", "hold_lr", "final_lr", "total_steps", "phase_fractions", "stride"});
    sched::TriStage t;
    t.init_lr = Get<double>(j, "init_lr", t.init_lr);
    t.hold_lr = Get<double>(j, "hold_lr", t.hold_lr);
    t.final_lr = Get<double>(j, "final_lr", t.final_lr);
    t.total_steps = Get<std::int64_t>(j, "total_steps", t.total_steps);
    if (j.contains("phase_fractions")) {
      auto f = Get<std::vector<double>>(j, "phase_fractions", {});
      if (f.size() != 3) ConfigError("tri-stage phase_fractions needs three values");
      t.phase_fractions = {f[0], f[1], f[2]};
    }
    schedule = t;
  } else {
    ConfigError("unknown schedule kind '" + kind + "'");
  }
  sched::Validate(schedule);
  return schedule;
}

PipelineConfig ConfigFromJson(const nlohmann::json &j, const fs::path &base_dir) {
  CheckKeys(j, "config",
            {"seed", "workers", "sample_rate", "paths", "catalog", "segment", "augment", "batch", "schedules"});
  PipelineConfig c;
  if (!j.contains("seed") || !j["seed"].is_number_integer()) {
    ConfigError("'seed' is required and must be an integer");
  }
  c.seed = j["seed"].get<std::uint64_t>();
  c.workers = Get<int>(j, "workers", 1);
  if (c.workers < 1) ConfigError("'workers' must be at least 1");
  c.sample_rate = Get<int>(j, "sample_rate", 16000);
  if (c.sample_rate <= 0) ConfigError("'sample_rate' must be positive");

  const nlohmann::json paths = j.value("paths", nlohmann::json::object());
  CheckKeys(paths, "paths", {"catalog", "stage_manifests", "pools", "output_dir"});
  auto require_existing = [](const fs::path &p, const char *what) {
    if (!fs::exists(p)) ConfigError(std::string(what) + " '" + p.string() + "' does not exist");
  };
  if (paths.contains("catalog")) {
    c.catalog = Resolve(base_dir, Get<std::string>(paths, "catalog", ""));
    require_existing(c.catalog, "catalog");
  }
  for (const auto &p : Get<std::vector<std::string>>(paths, "stage_manifests", {})) {
    c.stage_manifests.push_back(Resolve(base_dir, p));
    require_existing(c.stage_manifests.back(), "stage manifest");
  }
  if (paths.contains("pools")) {
    c.pools = Resolve(base_dir, Get<std::string>(paths, "pools", ""));
    require_existing(c.pools, "pool file");
  }
  c.output_dir = Resolve(base_dir, Get<std::string>(paths, "output_dir", "out"));

  const nlohmann::json cat = j.value("catalog", nlohmann::json::object());
  CheckKeys(cat, "catalog", {"allow_genres", "deny_genres", "max_duration_s"});
  for (const auto &g : Get<std::vector<std::string>>(cat, "allow_genres", {})) c.allow_genres.insert(g);
  for (const auto &g : Get<std::vector<std::string>>(cat, "deny_genres", {})) c.deny_genres.insert(g);
  for (const auto &g : c.allow_genres) {
    if (c.deny_genres.contains(g)) ConfigError("genre '" + g + "' is both allowed and denied");
  }
  c.max_duration_s = Get<double>(cat, "max_duration_s", c.max_duration_s);
  if (!(c.max_duration_s > 0.0)) ConfigError("catalog.max_duration_s must be positive");

  const nlohmann::json segment = j.value("segment", nlohmann::json::object());
  CheckKeys(segment, "segment", {"variant", "keywords"});
  c.variant = Get<std::string>(segment, "variant", c.variant);
  try {
    seg::ParseVariant(c.variant);
  } catch (const Error &e) {
    ConfigError(e.what());
  }
  if (segment.contains("keywords")) {
    c.keywords.clear();
    for (const auto &k : Get<std::vector<std::string>>(segment, "keywords", {})) c.keywords.insert(k);
  }

  const nlohmann::json augment = j.value("augment", nlohmann::json::object());
  CheckKeys(augment, "augment", {"mode", "fraction", "snr_range_db", "batch_size"});
  try {
    c.augment.mode = aug::ParseMode(Get<std::string>(augment, "mode", "mix-noise"));
  } catch (const Error &e) {
    ConfigError(e.what());
  }
  c.augment.fraction = Get<double>(augment, "fraction", c.augment.fraction);
  if (augment.contains("snr_range_db")) {
    auto r = Get<std::vector<double>>(augment, "snr_range_db", {});
    if (r.size() != 2) ConfigError("augment.snr_range_db needs [low, high]");
    c.augment.snr_low_db = r[0];
    c.augment.snr_high_db = r[1];
  }
  c.augment.seed = c.seed;
  aug::Validate(c.augment);
  c.augment_batch_size = Get<std::size_t>(augment, "batch_size", c.augment_batch_size);
  if (c.augment_batch_size == 0) ConfigError("augment.batch_size must be positive");

  const nlohmann::json batch = j.value("batch", nlohmann::json::object());
  CheckKeys(batch, "batch", {"budget_minutes", "budget_tokens", "max_utterance_s"});
  if (batch.contains("budget_minutes") && batch.contains("budget_tokens")) {
    ConfigError("give batch.budget_minutes or batch.budget_tokens, not both");
  }
  if (batch.contains("budget_minutes")) {
    c.budget_tokens = sched::TokensOf(Get<double>(batch, "budget_minutes", 5.0), c.sample_rate);
  } else {
    c.budget_tokens = Get<std::int64_t>(batch, "budget_tokens", sched::TokensOf(5.0, c.sample_rate));
  }
  if (c.budget_tokens <= 0) ConfigError("batch budget must be positive");
  c.max_utterance_s = Get<double>(batch, "max_utterance_s", c.max_utterance_s);

  if (j.contains("schedules")) {
    if (!j["schedules"].is_array()) ConfigError("'schedules' must be an array");
    for (const auto &s : j["schedules"]) c.schedules.push_back(ScheduleFromJson(s));
  }

  c.canonical = j.dump();
  return c;
}

PipelineConfig LoadConfig(const fs::path &path) {
  std::ifstream in(path);
  if (!in) ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    ConfigError(path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, fs::absolute(path).parent_path());
}

Json RunCatalogFilter(const PipelineConfig &config) {
  if (config.catalog.empty()) ConfigError("paths.catalog is not set");
  auto records = catalog::ReadCatalog(config.catalog);
  const std::size_t n_in = records.size();
  const double hours_in = TotalHours(records);
  std::stable_sort(records.begin(), records.end(), catalog::RecordLess);

  auto by_genre = catalog::FilterGenre(records, config.allow_genres, config.deny_genres);
  auto by_duration = catalog::FilterDuration(by_genre, config.max_duration_s);
  auto kept = catalog::DedupConsecutive(by_duration);
  const double hours_out = TotalHours(kept);

  fs::create_directories(config.output_dir);
  const auto header = MakeHeader(config, "catalog-filter");
  OutputSet outputs;
  {
    manifest::ManifestWriter writer(outputs.Stage(Out(config, kCatalogOut)));
    writer.Append(manifest::HeaderRecord(header));
    for (const auto &r : kept) writer.Append(manifest::ToJson(r));
  }
  Json report;
  report["records_in"] = n_in;
  report["removed_genre"] = records.size() - by_genre.size();
  report["removed_duration"] = by_genre.size() - by_duration.size();
  report["removed_duplicate"] = by_duration.size() - kept.size();
  report["records_out"] = kept.size();
  report["hours_in"] = hours_in;
  report["hours_out"] = hours_out;
  report["retained_fraction"] = hours_in > 0.0 ? hours_out / hours_in : 0.0;
  WriteJsonFile(outputs.Stage(Out(config, kCatalogReport)), WithHeader(header, report));
  outputs.Commit();
  manifest::BuildIndex(Out(config, kCatalogOut));
  return report;
}

Json RunSegment(const PipelineConfig &config, const std::optional<std::string> &variant_override) {
  const auto &variant = seg::ParseVariant(variant_override.value_or(config.variant));
  const auto records = LoadFilteredCatalog(config);

  std::map<std::string, std::vector<seg::TranscriptSegment>> by_media;
  std::set<std::string> known;
  for (const auto &r : records) known.insert(r.id);
  std::size_t foreign = 0;
  if (variant.required_stage) {
    if (config.stage_manifests.empty()) ConfigError("paths.stage_manifests is empty");
    for (const auto &path : config.stage_manifests) {
      for (const auto &j : manifest::ReadJsonl(path)) {
        auto s = manifest::SegmentFromJson(j);
        if (s.stage != *variant.required_stage) continue;
        if (!known.contains(s.media_id)) {
          ++foreign;
          continue;
        }
        by_media[s.media_id].push_back(std::move(s));
      }
    }
  }

  std::vector<std::vector<seg::Utterance>> results(records.size());
  std::vector<std::size_t> dropped(records.size(), 0);
  ParallelFor(records.size(), EffectiveWorkers(config), [&](std::size_t i) {
    const auto &r = records[i];
    auto it = by_media.find(r.id);
    static const std::vector<seg::TranscriptSegment> kNone;
    const auto &segments = it == by_media.end() ? kNone : it->second;
    if (variant.required_stage && segments.empty()) return;
    auto utts = seg::RunVariant(variant, segments, config.keywords, r.id, r.duration_s);
    std::vector<seg::Utterance> inside;
    for (auto &u : utts) {
      if (u.end_s <= r.duration_s) {
        inside.push_back(std::move(u));
      } else {
        ++dropped[i];
      }
    }
    results[i] = std::move(inside);
  });

  fs::create_directories(config.output_dir);
  const std::string command = std::string("segment --variant ") + std::string(variant.label);
  OutputSet outputs;
  std::size_t count = 0;
  double seconds = 0.0;
  std::size_t dropped_total = 0;
  {
    manifest::ManifestWriter writer(outputs.Stage(Out(config, kUtterances)));
    writer.Append(manifest::HeaderRecord(MakeHeader(config, command)));
    for (std::size_t i = 0; i < results.size(); ++i) {
      dropped_total += dropped[i];
      for (const auto &u : results[i]) {
        Json j = manifest::ToJson(u, variant.required_stage);
        j["variant"] = variant.label;
        writer.Append(j);
        ++count;
        seconds += u.duration_s();
      }
    }
  }
  outputs.Commit();

  Json summary;
  summary["variant"] = variant.label;
  summary["media"] = records.size();
  summary["utterances"] = count;
  summary["hours"] = seconds / 3600.0;
  summary["dropped_outside_media"] = dropped_total;
  summary["segments_for_unknown_media"] = foreign;
  return summary;
}

Json RunNormalize(const PipelineConfig &config) {
  const fs::path input = Out(config, kUtterances);
  auto records = manifest::ReadJsonl(input);
  textnorm::NormalizeCounters counters;
  std::size_t invalid = 0;
  OutputSet outputs;
  {
    manifest::ManifestWriter writer(outputs.Stage(Out(config, kNormalized)));
    writer.Append(manifest::HeaderRecord(MakeHeader(config, "normalize")));
    for (auto &j : records) {
      if (!j.contains("text") || !j["text"].is_string()) {
        throw Error(ErrorCode::kParseError, "utterance record without text in " + input.string());
      }
      const std::string raw = j["text"].get<std::string>();
      std::string norm = textnorm::Normalize(raw, &counters);
      if (!textnorm::ValidateVocab(norm)) ++invalid;
      j["text"] = norm;
      j["raw_text"] = raw;
      writer.Append(j);
    }
  }
  outputs.Commit();
  Json summary;
  summary["utterances"] = records.size();
  summary["unmapped_letters"] = counters.unmapped_letters;
  summary["invalid_utf8_bytes"] = counters.invalid_bytes;
  summary["vocab_violations"] = invalid;
  return summary;
}

namespace {

aug::Pools LoadPools(const PipelineConfig &config) {
  aug::Pools pools;
  if (config.pools.empty()) return pools;
  const fs::path base = config.pools.parent_path();
  for (const auto &j : manifest::ReadJsonl(config.pools)) {
    if (!j.contains("path") || !j.contains("role")) {
      throw Error(ErrorCode::kParseError, "pool records need 'path' and 'role' in " + config.pools.string());
    }
    const auto role = aug::ParseRole(j["role"].get<std::string>());
    const fs::path path = Resolve(base, j["path"].get<std::string>());
    aug::Clip clip;
    clip.id = j.contains("id") ? j["id"].get<std::string>() : path.stem().string();
    if (j.contains("speaker") && j["speaker"].is_string()) clip.speaker = j["speaker"].get<std::string>();
    if (j.contains("session") && j["session"].is_string()) clip.session = j["session"].get<std::string>();
    clip.audio = ReadPcm(path);
    if (clip.audio.sample_rate != config.sample_rate) {
      throw Error(ErrorCode::kSampleRateMismatch, path.string() + " is not at " +
                                                      std::to_string(config.sample_rate) + " Hz");
    }
    auto &pool = pools[role];
    pool.role = role;
    pool.clips.push_back(std::move(clip));
  }
  return pools;
}

}  // namespace

Json RunAugment(const PipelineConfig &config) {
  const fs::path input = LatestUtteranceManifest(config, {kNormalized, kUtterances});
  auto records = manifest::ReadJsonl(input);
  const auto catalog = LoadFilteredCatalog(config);
  std::map<std::string, const catalog::BroadcastRecord *> by_id;
  for (const auto &r : catalog) by_id[r.id] = &r;

  std::map<std::string, AudioClip> media;
  std::vector<aug::Clip> clips;
  clips.reserve(records.size());
  for (const auto &j : records) {
    const auto u = manifest::UtteranceFromJson(j);
    auto rec = by_id.find(u.media_id);
    if (rec == by_id.end()) {
      throw Error(ErrorCode::kOutOfRange, "utterance " + u.id + " refers to unknown media " + u.media_id);
    }
    auto m = media.find(u.media_id);
    if (m == media.end()) {
      AudioClip clip = ReadPcm(MediaPath(config, *rec->second));
      if (clip.sample_rate != config.sample_rate) {
        throw Error(ErrorCode::kSampleRateMismatch, "media " + u.media_id + " is not at " +
                                                        std::to_string(config.sample_rate) + " Hz");
      }
      m = media.emplace(u.media_id, std::move(clip)).first;
    }
    clips.push_back(aug::Clip{u.id, u.speaker, u.media_id, Crop(m->second, u.start_s, u.end_s)});
  }
  media.clear();

  aug::Pools pools = LoadPools(config);
  if (aug::RoleFor(config.augment.mode) == aug::PoolRole::kSpeech && !pools.contains(aug::PoolRole::kSpeech)) {
    // Without an explicit speech pool, partners come from the corpus itself.
    pools[aug::PoolRole::kSpeech] = aug::SourcePool{aug::PoolRole::kSpeech, clips};
  }

  const std::size_t bs = config.augment_batch_size;
  const std::size_t n_batches = (clips.size() + bs - 1) / bs;
  std::vector<aug::AugmentedBatch> done(n_batches);
  ParallelFor(n_batches, EffectiveWorkers(config), [&](std::size_t b) {
    const auto first = clips.begin() + static_cast<std::ptrdiff_t>(b * bs);
    const auto last = clips.begin() + static_cast<std::ptrdiff_t>(std::min(clips.size(), (b + 1) * bs));
    done[b] = aug::AugmentBatch(std::vector<aug::Clip>(first, last), config.augment, pools, b);
  });

  fs::create_directories(config.output_dir);
  const auto header = MakeHeader(config, "augment");
  OutputSet outputs;
  const fs::path audio_dir = outputs.Stage(Out(config, kAudioDir));
  fs::create_directories(audio_dir);
  std::size_t touched = 0;
  {
    manifest::ManifestWriter corpus(outputs.Stage(Out(config, kAugmented)));
    manifest::ManifestWriter log(outputs.Stage(Out(config, kAugmentLog)));
    corpus.Append(manifest::HeaderRecord(header));
    log.Append(manifest::HeaderRecord(header));
    std::size_t record_index = 0;
    for (std::size_t b = 0; b < n_batches; ++b) {
      std::set<std::size_t> changed;
      for (const auto &row : done[b].log) changed.insert(row.position);
      for (std::size_t k = 0; k < done[b].items.size(); ++k, ++record_index) {
        const auto &item = done[b].items[k];
        const std::string rel = std::string(kAudioDir) + "/" + item.id + ".wav";
        WritePcm(audio_dir / (item.id + ".wav"), item.audio, PcmFormat::kFloat32);
        Json j = records[record_index];
        j["duration"] = item.audio.duration_s();
        j["audio_path"] = rel;
        j["augmented"] = changed.contains(k);
        j["augment_batch"] = b;
        corpus.Append(j);
      }
      for (const auto &row : done[b].log) {
        Json r;
        r["batch_index"] = row.batch_index;
        r["position"] = row.position;
        r["utterance_id"] = row.utterance_id;
        r["mode"] = aug::ModeName(row.mode);
        r["source_id"] = row.source_id;
        if (row.snr_db) r["snr_db"] = *row.snr_db;
        if (row.gain) r["gain"] = *row.gain;
        if (row.peak_scale) r["peak_scale"] = *row.peak_scale;
        if (row.offset) r["offset"] = *row.offset;
        log.Append(r);
        ++touched;
      }
    }
  }
  outputs.Commit();

  Json summary;
  summary["input"] = input.filename().string();
  summary["mode"] = aug::ModeName(config.augment.mode);
  summary["utterances"] = clips.size();
  summary["batches"] = n_batches;
  summary["touched"] = touched;
  return summary;
}

Json RunBatch(const PipelineConfig &config) {
  const fs::path input = LatestUtteranceManifest(config, {kAugmented, kNormalized, kUtterances});
  std::vector<batch::Item> items;
  for (const auto &j : manifest::ReadJsonl(input)) {
    const auto id = j.at("id").get<std::string>();
    const double duration = j.at("duration").get<double>();
    // Cap is on the segmented span, not the (possibly concatenated) audio.
    const double span = j.contains("start_s") && j.contains("end_s")
                            ? j.at("end_s").get<double>() - j.at("start_s").get<double>()
                            : duration;
    if (!(duration > 0.0) || !(span > 0.0) || span > config.max_utterance_s) {
      throw Error(ErrorCode::kOversizeUtterance,
                  "utterance " + id + " spans " + std::to_string(span) + " s, outside (0, " +
                      std::to_string(config.max_utterance_s) + "]");
    }
    items.push_back({id, batch::TokensForDuration(duration, config.sample_rate)});
  }
  const auto plan = batch::Assemble(items, config.budget_tokens, config.seed);
  const auto fill = batch::PlanStats(plan);

  const auto header = MakeHeader(config, "batch");
  OutputSet outputs;
  {
    manifest::ManifestWriter writer(outputs.Stage(Out(config, kPlan)));
    writer.Append(manifest::HeaderRecord(header));
    std::unordered_map<std::string, std::int64_t> tokens;
    for (const auto &it : items) tokens[it.id] = it.tokens;
    for (std::size_t b = 0; b < plan.batches.size(); ++b) {
      for (const auto &id : plan.batches[b].utterance_ids) {
        Json r;
        r["batch_index"] = b;
        r["utterance_id"] = id;
        r["tokens"] = tokens.at(id);
        writer.Append(r);
      }
    }
  }
  Json report;
  report["input"] = input.filename().string();
  report["token_budget"] = plan.token_budget;
  report["batches"] = plan.batches.size();
  report["utterances"] = items.size();
  report["mean_fill"] = fill.mean_fill;
  report["fill"] = fill.fill;
  report["last_batch_partial"] = !plan.batches.empty() && plan.batches.back().partial;
  WriteJsonFile(outputs.Stage(Out(config, kPlanReport)), WithHeader(header, report));
  outputs.Commit();
  return report;
}

Json RunStats(const PipelineConfig &config) {
  const fs::path input = LatestUtteranceManifest(config, {kAugmented, kNormalized, kUtterances});
  const auto catalog = LoadFilteredCatalog(config);
  std::map<std::string, std::string> genre_of;
  for (const auto &r : catalog) genre_of[r.id] = r.genre;

  std::vector<catalog::StatsItem> items;
  std::size_t vocab_valid = 0;
  for (const auto &j : manifest::ReadJsonl(input)) {
    const auto media = j.at("media_id").get<std::string>();
    auto g = genre_of.find(media);
    items.push_back({j.at("duration").get<double>(), g == genre_of.end() ? "unknown" : g->second});
    if (textnorm::ValidateVocab(j.at("text").get<std::string>())) ++vocab_valid;
  }
  const auto stats = catalog::ComputeStats(items);
  const double source_hours = TotalHours(catalog);

  Json report = manifest::ToJson(stats);
  report["input"] = input.filename().string();
  report["source_hours"] = source_hours;
  report["retained_fraction"] = source_hours > 0.0 ? stats.total_hours / source_hours : 0.0;
  report["vocab_valid"] = vocab_valid;

  OutputSet outputs;
  WriteJsonFile(outputs.Stage(Out(config, kStats)), WithHeader(MakeHeader(config, "stats"), report));
  outputs.Commit();
  return report;
}

void WriteScheduleFile(const fs::path &path, const sched::Schedule &schedule,
                       std::int64_t stride, const manifest::Header &header) {
  std::ostringstream table;
  table << "# tool=" << header.tool << "\n# version=" << header.version
        << "\n# command=" << header.command << "\n# config_hash=" << header.config_hash
        << "\n# seed=" << header.seed << '\n';
  sched::WriteTable(table, schedule, stride);
  OutputSet outputs;
  {
    std::ofstream out(outputs.Stage(path), std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
    out << table.str();
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
  }
  outputs.Commit();
}

Json RunConfiguredSchedules(const PipelineConfig &config) {
  if (config.schedules.empty()) ConfigError("config has no 'schedules'");
  fs::create_directories(config.output_dir);
  const auto raw = nlohmann::json::parse(config.canonical);
  Json written = Json::array();
  for (std::size_t i = 0; i < config.schedules.size(); ++i) {
    const auto &s = config.schedules[i];
    const auto stride = Get<std::int64_t>(raw["schedules"][i], "stride", 1);
    const fs::path path =
        config.output_dir / ("schedule_" + std::to_string(i) + "_" + std::string(sched::KindName(s)) + ".tsv");
    WriteScheduleFile(path, s, stride, MakeHeader(config, "sched " + std::to_string(i)));
    written.push_back(path.filename().string());
  }
  return written;
}

Json NormalizeTextFile(const fs::path &input, const fs::path &output) {
  std::ifstream in(input);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + input.string());
  textnorm::NormalizeCounters counters;
  std::ostringstream body;
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    body << textnorm::Normalize(line, &counters) << '\n';
    ++lines;
  }
  OutputSet outputs;
  {
    std::ofstream out(outputs.Stage(output), std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + output.string());
    out << body.str();
  }
  outputs.Commit();
  Json summary;
  summary["lines"] = lines;
  summary["unmapped_letters"] = counters.unmapped_letters;
  summary["invalid_utf8_bytes"] = counters.invalid_bytes;
  return summary;
}

Json ScoreWerFiles(const fs::path &reference, const fs::path &hypothesis,
                   const std::optional<fs::path> &output) {
  auto read_lines = [](const fs::path &p) {
    std::ifstream in(p);
    if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + p.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    return lines;
  };
  const auto refs = read_lines(reference);
  const auto hyps = read_lines(hypothesis);
  if (refs.size() != hyps.size()) {
    throw Error(ErrorCode::kParseError, "reference has " + std::to_string(refs.size()) +
                                            " lines, hypothesis has " + std::to_string(hyps.size()));
  }

  std::vector<Json> rows;
  std::size_t s = 0, d = 0, ins = 0, n = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    textnorm::WerBreakdown w;
    try {
      w = textnorm::Wer(refs[i], hyps[i]);
    } catch (const Error &e) {
      throw Error(e.code(), reference.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    Json r;
    r["line"] = i + 1;
    r["ref_words"] = w.ref_words;
    r["substitutions"] = w.substitutions;
    r["deletions"] = w.deletions;
    r["insertions"] = w.insertions;
    r["wer"] = w.wer;
    rows.push_back(std::move(r));
    s += w.substitutions;
    d += w.deletions;
    ins += w.insertions;
    n += w.ref_words;
  }
  Json total;
  total["pairs"] = refs.size();
  total["ref_words"] = n;
  total["substitutions"] = s;
  total["deletions"] = d;
  total["insertions"] = ins;
  total["wer"] = n > 0 ? static_cast<double>(s + d + ins) / static_cast<double>(n) : 0.0;

  if (output) {
    manifest::Header header;
    header.version = ToolVersion();
    header.command = "wer";
    header.config_hash = Sha256Hex("wer\n" + reference.string() + "\n" + hypothesis.string());
    OutputSet outputs;
    {
      manifest::ManifestWriter writer(outputs.Stage(*output));
      writer.Append(manifest::HeaderRecord(header));
      for (const auto &r : rows) writer.Append(r);
      Json t;
      t["total"] = total;
      writer.Append(t);
    }
    outputs.Commit();
  }
  return total;
}

}  // namespace bcast::pipeline
