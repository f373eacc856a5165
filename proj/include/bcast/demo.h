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

#ifndef BCAST_DEMO_H_
#define BCAST_DEMO_H_

#include <cstdint>
#include <filesystem>

namespace bcast::demo {

struct DemoLayout {
  std::filesystem::path root;
  std::filesystem::path config;
  std::filesystem::path catalog;
  std::filesystem::path stage_asr;
  std::filesystem::path stage_aligned;
  std::filesystem::path stage_diarized;
  std::filesystem::path pools;
  std::filesystem::path output_dir;
};

inline constexpr int kMediaFiles = 10;

/// Writes a small synthetic broadcast corpus under `dir`: ten 16 kHz media
/// files with tone-burst "speech", transcripts for all three stages, a
/// catalog with rows the curation rules must drop, noise and music pools,
/// and a config.json wiring them together. Output is a function of `seed`.
DemoLayout Generate(const std::filesystem::path &dir, std::uint64_t seed = 20240901);

}  // namespace bcast::demo

#endif  // BCAST_DEMO_H_
