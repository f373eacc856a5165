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

// bcast: broadcast-archive corpus preparation.
//
// Subcommands run one pipeline stage each and read/write line-delimited JSON
// manifests under the config's output directory:
//
//   catalog-filter -> segment -> normalize -> augment -> batch -> stats
//
// `sched` and `wer` also work without a config.
//
// Exit status: 0 success, 1 usage or configuration error, 2 data error.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bcast/error.h"
#include "bcast/pipeline.h"
#include "bcast/scheduler.h"

namespace {

using bcast::Error;
using bcast::ErrorCode;
namespace pipeline = bcast::pipeline;
namespace sched = bcast::sched;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

bool IsUsageError(ErrorCode code) {
  return code == ErrorCode::kInvalidConfig || code == ErrorCode::kInvalidArgument;
}

struct SchedFlags {
  std::string kind;
  double peak = 0.0;
  std::int64_t steps = 0;
  std::optional<std::int64_t> steps_up;
  double min_ratio = 1.0 / 100.0;
  double warmup_fraction = 0.10;
  double init_ratio = 1.0 / 1000.0;
  double final_ratio = 1.0 / 100.0;
  double init_lr = 5e-7;
  double final_lr = 2.5e-6;
  std::vector<double> phases = {0.10, 0.40, 0.50};
  std::int64_t stride = 1;
  std::string out;
};

sched::Schedule ScheduleFromFlags(const SchedFlags &f) {
  if (f.kind == "triangular") {
    sched::Triangular t;
    t.peak_lr = f.peak;
    t.steps_up = f.steps_up.value_or(f.steps / 2);
    t.steps_down = f.steps - t.steps_up;
    t.min_ratio = f.min_ratio;
    return t;
  }
  if (f.kind == "two-stage") {
    return sched::TwoStage{f.peak, f.steps, f.warmup_fraction, f.init_ratio, f.final_ratio};
  }
  if (f.kind == "tri-stage") {
    if (f.phases.size() != 3) throw Error(ErrorCode::kInvalidArgument, "--phases needs three values");
    return sched::TriStage{f.init_lr, f.peak, f.final_lr, f.steps, {f.phases[0], f.phases[1], f.phases[2]}};
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown --kind '" + f.kind + "'");
}

std::string CommandLine(int argc, char **argv) {
  std::ostringstream os;
  for (int i = 1; i < argc; ++i) os << (i > 1 ? " " : "") << argv[i];
  return os.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Broadcast-archive speech corpus toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pipeline::ToolVersion());

  std::string config_path;
  app.add_option("-c,--config", config_path, "Pipeline config (JSON)");

  auto *catalog_cmd = app.add_subcommand("catalog-filter", "Genre, duration and duplicate curation of the catalog");

  std::optional<std::string> variant;
  auto *segment_cmd = app.add_subcommand("segment", "Turn stage manifests into utterances");
  segment_cmd->add_option("--variant", variant, "Segmentation variant (overrides the config)");

  bool plain = false;
  std::string norm_in, norm_out;
  auto *normalize_cmd = app.add_subcommand("normalize", "Normalize utterance text to a-z, apostrophe and space");
  normalize_cmd->add_flag("--plain", plain, "Normalize a plain text file line by line");
  normalize_cmd->add_option("--input", norm_in, "Input text file (with --plain)");
  normalize_cmd->add_option("--output", norm_out, "Output text file (with --plain)");

  auto *augment_cmd = app.add_subcommand("augment", "Apply the configured degradation to the corpus");
  auto *batch_cmd = app.add_subcommand("batch", "Pack utterances into token-budget batches");
  auto *stats_cmd = app.add_subcommand("stats", "Corpus statistics report");

  SchedFlags sf;
  auto *sched_cmd = app.add_subcommand("sched", "Export learning-rate schedule tables");
  sched_cmd->add_option("--kind", sf.kind, "triangular | two-stage | tri-stage");
  sched_cmd->add_option("--peak", sf.peak, "Peak LR (hold LR for tri-stage)");
  sched_cmd->add_option("--steps", sf.steps, "Total steps");
  sched_cmd->add_option("--steps-up", sf.steps_up, "Triangular ramp-up steps (default: half)");
  sched_cmd->add_option("--min-ratio", sf.min_ratio, "Triangular min/peak ratio");
  sched_cmd->add_option("--warmup-fraction", sf.warmup_fraction, "Two-stage warm-up share of steps");
  sched_cmd->add_option("--init-ratio", sf.init_ratio, "Two-stage initial/peak ratio");
  sched_cmd->add_option("--final-ratio", sf.final_ratio, "Two-stage final/peak ratio");
  sched_cmd->add_option("--init-lr", sf.init_lr, "Tri-stage initial LR");
  sched_cmd->add_option("--final-lr", sf.final_lr, "Tri-stage final LR");
  sched_cmd->add_option("--phases", sf.phases, "Tri-stage phase fractions")->delimiter(',');
  sched_cmd->add_option("--stride", sf.stride, "Emit every N-th step");
  sched_cmd->add_option("--out", sf.out, "Output file (default: stdout)");

  std::string ref_path, hyp_path, wer_out;
  auto *wer_cmd = app.add_subcommand("wer", "Caseless word error rate of paired line files");
  wer_cmd->add_option("--ref", ref_path, "Reference lines")->required();
  wer_cmd->add_option("--hyp", hyp_path, "Hypothesis lines")->required();
  wer_cmd->add_option("--out", wer_out, "Per-pair breakdown (JSON lines)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    auto config = [&]() {
      if (config_path.empty()) throw Error(ErrorCode::kInvalidConfig, "--config is required for this subcommand");
      return pipeline::LoadConfig(config_path);
    };

    bcast::manifest::Json summary;
    if (*catalog_cmd) {
      summary = pipeline::RunCatalogFilter(config());
    } else if (*segment_cmd) {
      summary = pipeline::RunSegment(config(), variant);
    } else if (*normalize_cmd) {
      if (plain) {
        if (norm_in.empty() || norm_out.empty()) {
          throw Error(ErrorCode::kInvalidArgument, "--plain needs --input and --output");
        }
        summary = pipeline::NormalizeTextFile(norm_in, norm_out);
      } else {
        summary = pipeline::RunNormalize(config());
      }
    } else if (*augment_cmd) {
      summary = pipeline::RunAugment(config());
    } else if (*batch_cmd) {
      summary = pipeline::RunBatch(config());
    } else if (*stats_cmd) {
      summary = pipeline::RunStats(config());
    } else if (*sched_cmd) {
      if (sf.kind.empty()) {
        summary["written"] = pipeline::RunConfiguredSchedules(config());
      } else {
        const auto schedule = ScheduleFromFlags(sf);
        bcast::manifest::Header header;
        header.version = pipeline::ToolVersion();
        header.command = "sched";
        header.config_hash = pipeline::Sha256Hex(CommandLine(argc, argv));
        if (sf.out.empty()) {
          std::cout << "# tool=" << header.tool << "\n# version=" << header.version
                    << "\n# command=" << header.command << "\n# config_hash=" << header.config_hash
                    << "\n# seed=" << header.seed << '\n';
          sched::WriteTable(std::cout, schedule, sf.stride);
          return 0;
        }
        pipeline::WriteScheduleFile(sf.out, schedule, sf.stride, header);
        summary["written"] = sf.out;
      }
    } else if (*wer_cmd) {
      std::optional<std::filesystem::path> out;
      if (!wer_out.empty()) out = wer_out;
      summary = pipeline::ScoreWerFiles(ref_path, hyp_path, out);
    }
    std::cout << summary.dump(2) << std::endl;
    return 0;
  } catch (const Error &e) {
    std::cerr << "bcast: " << e.what() << '\n';
    return IsUsageError(e.code()) ? kExitUsage : kExitData;
  } catch (const std::exception &e) {
    std::cerr << "bcast: " << e.what() << '\n';
    return kExitData;
  }
}
