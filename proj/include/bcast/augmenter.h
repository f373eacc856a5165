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

#ifndef BCAST_AUGMENTER_H_
#define BCAST_AUGMENTER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcast/audio.h"
#include "bcast/rng.h"

namespace bcast::aug {

enum class Mode {
  kOneSpeakerCat,   // 1spk-cat
  kTwoSpeakerCat,   // 2spk-cat
  kTwoSpeakerMix,   // 2spk-mix
  kSubNoise,
  kSubMusic,
  kMixNoise,
  kMixMusic,
  kMixVocal,
  kMixInstrumental,
};

enum class PoolRole { kNoise, kMusic, kVocalStem, kInstrumentalStem, kSpeech };

std::string_view ModeName(Mode mode);
Mode ParseMode(std::string_view name);
std::string_view RoleName(PoolRole role);
PoolRole ParseRole(std::string_view name);

/// Pool a mode draws its partner, interferer or replacement from.
PoolRole RoleFor(Mode mode);
/// Concatenation modes touch every utterance; the others a fraction.
bool IsCatMode(Mode mode);

struct AugmentSpec {
  Mode mode = Mode::kMixNoise;
  double fraction = 0.10;
  double snr_low_db = 0.0;
  double snr_high_db = 15.0;
  std::uint64_t seed = 0;
};

void Validate(const AugmentSpec &spec);

/// An utterance of the batch, or an entry of a source pool.
struct Clip {
  std::string id;
  std::optional<std::string> speaker;
  std::optional<std::string> session;
  AudioClip audio;

  bool operator==(const Clip &) const = default;
};

struct SourcePool {
  PoolRole role = PoolRole::kNoise;
  std::vector<Clip> clips;
};

using Pools = std::map<PoolRole, SourcePool>;

/// Exactly round(fraction * n) distinct indices, sorted ascending.
std::vector<std::size_t> SelectTargets(std::size_t n, double fraction, Rng &rng);

struct Augmented {
  AudioClip audio;
  std::string source_id;          // partner, interferer or replacement
  std::optional<double> snr_db;   // mixing only
  std::optional<double> gain;     // mixing only
  std::optional<double> peak_scale;
  std::optional<std::size_t> offset;  // window start in the source clip
};

/// utt followed by a partner from the same session (1spk-cat) or from a
/// different speaker (2spk-cat).
Augmented ApplyConcat(const Clip &utt, const SourcePool &pool, Mode mode, Rng &rng);

/// Adds an interferer from the pool at an SNR drawn uniformly from
/// [snr_low_db, snr_high_db). Speech pools only offer other speakers.
Augmented ApplyMix(const Clip &utt, const SourcePool &pool, double snr_low_db,
                   double snr_high_db, Rng &rng);

/// Replaces the utterance with a pool clip cut or looped to its length.
Augmented ApplySubstitute(const Clip &utt, const SourcePool &pool, Rng &rng);

struct LogRow {
  std::uint64_t batch_index = 0;
  std::size_t position = 0;  // index within the batch
  std::string utterance_id;
  Mode mode = Mode::kMixNoise;
  std::string source_id;
  std::optional<double> snr_db;
  std::optional<double> gain;
  std::optional<double> peak_scale;
  std::optional<std::size_t> offset;
};

struct AugmentedBatch {
  std::vector<Clip> items;
  std::vector<LogRow> log;
};

/// Applies `spec` to one batch. The generator is derived from
/// (spec.seed, batch_index), so batches can be processed in any order.
AugmentedBatch AugmentBatch(const std::vector<Clip> &batch, const AugmentSpec &spec,
                            const Pools &pools, std::uint64_t batch_index);

}  // namespace bcast::aug

#endif  // BCAST_AUGMENTER_H_
