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

#ifndef BCAST_PIPELINE_H_
#define BCAST_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcast/augmenter.h"
#include "bcast/manifest.h"
#include "bcast/scheduler.h"

namespace bcast::pipeline {

namespace fs = std::filesystem;

// Output file names inside PipelineConfig::output_dir.
inline constexpr const char *kCatalogOut = "catalog.filtered.jsonl";
inline constexpr const char *kCatalogReport = "catalog_report.json";
inline constexpr const char *kUtterances = "utterances.jsonl";
inline constexpr const char *kNormalized = "utterances.norm.jsonl";
inline constexpr const char *kAugmented = "augmented.jsonl";
inline constexpr const char *kAugmentLog = "augment_log.jsonl";
inline constexpr const char *kAudioDir = "audio";
inline constexpr const char *kPlan = "plan.jsonl";
inline constexpr const char *kPlanReport = "plan_report.json";
inline constexpr const char *kStats = "stats.json";

/// Parsed form of the JSON config file. Relative paths are resolved against
/// the directory holding the config.
struct PipelineConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  int sample_rate = 16000;

  fs::path catalog;
  std::vector<fs::path> stage_manifests;
  fs::path pools;
  fs::path output_dir;

  std::set<std::string> allow_genres;
  std::set<std::string> deny_genres;
  double max_duration_s = 3.0 * 3600.0;

  std::string variant = "w-pp-3s";
  std::set<std::string> keywords = {"muziek"};

  aug::AugmentSpec augment;
  std::size_t augment_batch_size = 30;

  std::int64_t budget_tokens = 4800000;
  double max_utterance_s = 30.0;

  std::vector<sched::Schedule> schedules;

  // Sorted-key dump of the source JSON; input to the config hash.
  std::string canonical;
};

PipelineConfig ConfigFromJson(const nlohmann::json &config, const fs::path &base_dir);
PipelineConfig LoadConfig(const fs::path &path);

/// Hex SHA-256 of the canonical config followed by the command line.
std::string ConfigHash(const PipelineConfig &config, const std::string &command);

/// Worker count, overridable through the BCAST_WORKERS environment variable.
int EffectiveWorkers(const PipelineConfig &config);

sched::Schedule ScheduleFromJson(const nlohmann::json &j);

// Each runner writes its artifacts under output_dir (all-or-nothing) and
// returns a short summary that the CLI prints.
manifest::Json RunCatalogFilter(const PipelineConfig &config);
manifest::Json RunSegment(const PipelineConfig &config,
                          const std::optional<std::string> &variant_override = std::nullopt);
manifest::Json RunNormalize(const PipelineConfig &config);
manifest::Json RunAugment(const PipelineConfig &config);
manifest::Json RunBatch(const PipelineConfig &config);
manifest::Json RunStats(const PipelineConfig &config);
/// Writes one table per configured schedule; returns the written paths.
manifest::Json RunConfiguredSchedules(const PipelineConfig &config);

/// Normalizes a plain text file line by line.
manifest::Json NormalizeTextFile(const fs::path &input, const fs::path &output);

/// Scores paired reference/hypothesis lines. Writes one JSON record per pair
/// followed by a {"total": ...} record.
manifest::Json ScoreWerFiles(const fs::path &reference, const fs::path &hypothesis,
                             const std::optional<fs::path> &output);

/// Schedule table with the reproducibility header lines prepended.
void WriteScheduleFile(const fs::path &path, const sched::Schedule &schedule,
                       std::int64_t stride, const manifest::Header &header);

std::string ToolVersion();
std::string Sha256Hex(const std::string &data);

}  // namespace bcast::pipeline

#endif  // BCAST_PIPELINE_H_
