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

#include "bcast/augmenter.h"

#include <algorithm>
#include <cmath>

#include "bcast/error.h"

namespace bcast::aug {

namespace {

struct ModeInfo {
  Mode mode;
  std::string_view name;
  PoolRole role;
};

constexpr ModeInfo kModes[] = {
    {Mode::kOneSpeakerCat, "1spk-cat", PoolRole::kSpeech},
    {Mode::kTwoSpeakerCat, "2spk-cat", PoolRole::kSpeech},
    {Mode::kTwoSpeakerMix, "2spk-mix", PoolRole::kSpeech},
    {Mode::kSubNoise, "sub-noise", PoolRole::kNoise},
    {Mode::kSubMusic, "sub-music", PoolRole::kMusic},
    {Mode::kMixNoise, "mix-noise", PoolRole::kNoise},
    {Mode::kMixMusic, "mix-music", PoolRole::kMusic},
    {Mode::kMixVocal, "mix-vocal", PoolRole::kVocalStem},
    {Mode::kMixInstrumental, "mix-instr", PoolRole::kInstrumentalStem},
};

const ModeInfo &Info(Mode mode) {
  for (const auto &m : kModes) {
    if (m.mode == mode) return m;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown augmentation mode");
}

const Clip &Pick(const std::vector<const Clip *> &eligible, Rng &rng) {
  return *eligible[static_cast<std::size_t>(rng.Below(eligible.size()))];
}

bool IsSubstitute(Mode mode) { return mode == Mode::kSubNoise || mode == Mode::kSubMusic; }

}  // namespace

std::string_view ModeName(Mode mode) { return Info(mode).name; }

Mode ParseMode(std::string_view name) {
  for (const auto &m : kModes) {
    if (m.name == name) return m.mode;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown augmentation mode '" + std::string(name) + "'");
}

std::string_view RoleName(PoolRole role) {
  switch (role) {
    case PoolRole::kNoise: return "noise";
    case PoolRole::kMusic: return "music";
    case PoolRole::kVocalStem: return "vocal-stem";
    case PoolRole::kInstrumentalStem: return "instrumental-stem";
    case PoolRole::kSpeech: return "speech";
  }
  return "noise";
}

PoolRole ParseRole(std::string_view name) {
  for (PoolRole r : {PoolRole::kNoise, PoolRole::kMusic, PoolRole::kVocalStem,
                     PoolRole::kInstrumentalStem, PoolRole::kSpeech}) {
    if (RoleName(r) == name) return r;
  }
  throw Error(ErrorCode::kParseError, "unknown pool role '" + std::string(name) + "'");
}

PoolRole RoleFor(Mode mode) { return Info(mode).role; }

bool IsCatMode(Mode mode) { return mode == Mode::kOneSpeakerCat || mode == Mode::kTwoSpeakerCat; }

void Validate(const AugmentSpec &spec) {
  if (!(spec.fraction > 0.0 && spec.fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "augment fraction must be in (0, 1]");
  }
  if (!std::isfinite(spec.snr_low_db) || !std::isfinite(spec.snr_high_db) ||
      spec.snr_low_db > spec.snr_high_db) {
    throw Error(ErrorCode::kInvalidConfig, "snr range must satisfy low <= high");
  }
}

std::vector<std::size_t> SelectTargets(std::size_t n, double fraction, Rng &rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fraction must be in [0, 1]");
  }
  const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  // Partial Fisher-Yates over the index range.
  std::vector<std::size_t> index(n);
  for (std::size_t i = 0; i < n; ++i) index[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(n - i));
    std::swap(index[i], index[j]);
  }
  index.resize(k);
  std::sort(index.begin(), index.end());
  return index;
}

Augmented ApplyConcat(const Clip &utt, const SourcePool &pool, Mode mode, Rng &rng) {
  if (!IsCatMode(mode)) throw Error(ErrorCode::kInvalidArgument, "not a concatenation mode");
  const bool same_session = mode == Mode::kOneSpeakerCat;
  if (same_session && !utt.session) {
    throw Error(ErrorCode::kNoEligiblePartner, utt.id + " has no session label");
  }
  if (!same_session && !utt.speaker) {
    throw Error(ErrorCode::kMissingSpeaker, utt.id + " has no speaker label");
  }
  std::vector<const Clip *> eligible;
  for (const auto &c : pool.clips) {
    if (c.id == utt.id) continue;
    const bool ok = same_session ? (c.session && *c.session == *utt.session)
                                 : (c.speaker && *c.speaker != *utt.speaker);
    if (ok) eligible.push_back(&c);
  }
  if (eligible.empty()) {
    throw Error(ErrorCode::kNoEligiblePartner,
                std::string("no ") + (same_session ? "same-session" : "other-speaker") +
                    " partner for " + utt.id);
  }
  const Clip &partner = Pick(eligible, rng);
  Augmented out;
  out.audio = Concat(utt.audio, partner.audio);
  out.source_id = partner.id;
  return out;
}

Augmented ApplyMix(const Clip &utt, const SourcePool &pool, double snr_low_db,
                   double snr_high_db, Rng &rng) {
  if (pool.clips.empty()) throw Error(ErrorCode::kEmptyPool, std::string(RoleName(pool.role)) + " pool is empty");
  std::vector<const Clip *> eligible;
  if (pool.role == PoolRole::kSpeech) {
    if (!utt.speaker) throw Error(ErrorCode::kMissingSpeaker, utt.id + " has no speaker label");
    for (const auto &c : pool.clips) {
      if (c.id != utt.id && c.speaker && *c.speaker != *utt.speaker) eligible.push_back(&c);
    }
    if (eligible.empty()) {
      throw Error(ErrorCode::kNoEligiblePartner, "no other-speaker interferer for " + utt.id);
    }
  } else {
    for (const auto &c : pool.clips) eligible.push_back(&c);
  }
  const double snr = rng.Uniform(snr_low_db, snr_high_db);
  const Clip &interferer = Pick(eligible, rng);
  MixResult mix = MixAtSnr(utt.audio, interferer.audio, snr, rng);
  Augmented out;
  out.audio = std::move(mix.mixture);
  out.source_id = interferer.id;
  out.snr_db = snr;
  out.gain = mix.noise_gain;
  out.peak_scale = mix.peak_scale;
  out.offset = mix.noise_offset;
  return out;
}

Augmented ApplySubstitute(const Clip &utt, const SourcePool &pool, Rng &rng) {
  if (pool.clips.empty()) throw Error(ErrorCode::kEmptyPool, std::string(RoleName(pool.role)) + " pool is empty");
  const Clip &source = pool.clips[static_cast<std::size_t>(rng.Below(pool.clips.size()))];
  if (source.audio.sample_rate != utt.audio.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch, "pool clip " + source.id + " vs " + utt.id);
  }
  Augmented out;
  std::size_t offset = 0;
  out.audio = MatchLength(source.audio, utt.audio.size(), rng, &offset);
  out.source_id = source.id;
  out.offset = offset;
  return out;
}

AugmentedBatch AugmentBatch(const std::vector<Clip> &batch, const AugmentSpec &spec,
                            const Pools &pools, std::uint64_t batch_index) {
  Validate(spec);
  const PoolRole role = RoleFor(spec.mode);
  auto pool_it = pools.find(role);
  if (pool_it == pools.end() || pool_it->second.clips.empty()) {
    throw Error(ErrorCode::kEmptyPool, std::string("mode ") + std::string(ModeName(spec.mode)) +
                                           " needs a non-empty " + std::string(RoleName(role)) + " pool");
  }
  const SourcePool &pool = pool_it->second;

  Rng rng = Rng::Derive(spec.seed, batch_index);
  std::vector<std::size_t> targets;
  if (IsCatMode(spec.mode)) {
    targets.resize(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) targets[i] = i;
  } else {
    targets = SelectTargets(batch.size(), spec.fraction, rng);
  }

  AugmentedBatch out;
  out.items = batch;
  for (std::size_t index : targets) {
    const Clip &utt = batch[index];
    Augmented a;
    if (IsCatMode(spec.mode)) {
      a = ApplyConcat(utt, pool, spec.mode, rng);
    } else if (IsSubstitute(spec.mode)) {
      a = ApplySubstitute(utt, pool, rng);
    } else {
      a = ApplyMix(utt, pool, spec.snr_low_db, spec.snr_high_db, rng);
    }
    out.items[index].audio = std::move(a.audio);
    out.log.push_back(LogRow{batch_index, index, utt.id, spec.mode, a.source_id, a.snr_db,
                             a.gain, a.peak_scale, a.offset});
  }
  return out;
}

}  // namespace bcast::aug
