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

#ifndef BCAST_AUDIO_H_
#define BCAST_AUDIO_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "bcast/rng.h"

namespace bcast {

/// Mono PCM buffer. Samples are nominally in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }

  bool operator==(const AudioClip &other) const = default;
};

enum class PcmFormat { kInt16, kFloat32 };

/// Reads a RIFF/WAVE file holding 16-bit integer or 32-bit float PCM, mono or
/// stereo. Stereo is downmixed by averaging the two channels.
AudioClip ReadPcm(const std::filesystem::path &path);

void WritePcm(const std::filesystem::path &path, const AudioClip &clip,
              PcmFormat format = PcmFormat::kInt16);

/// Mean of squared samples.
double RmsPower(const AudioClip &clip);

/// SNR in dB of `signal` over `noise`, from full-clip mean power.
double MeasureSnrDb(const AudioClip &signal, const AudioClip &noise);

/// Returns `length` samples taken from `source`: a random window when the
/// source is longer, the source looped from its start when shorter.
/// `offset` receives the start of the window (0 when looping).
AudioClip MatchLength(const AudioClip &source, std::size_t length, Rng &rng,
                      std::size_t *offset = nullptr);

struct MixResult {
  AudioClip mixture;
  // Gain applied to the length-matched noise before summation.
  double noise_gain = 1.0;
  // Factor the whole mixture was multiplied by for peak protection (1.0 when
  // no sample exceeded full scale).
  double peak_scale = 1.0;
  std::size_t noise_offset = 0;
};

/// output = peak_scale * (signal + noise_gain * noise'), where noise' is
/// `noise` length-matched to the signal and noise_gain realises `snr_db`
/// exactly on mean power.
MixResult MixAtSnr(const AudioClip &signal, const AudioClip &noise,
                   double snr_db, Rng &rng);

AudioClip Concat(const AudioClip &a, const AudioClip &b);

/// Cuts [start_s, end_s). Both times are rounded to the nearest sample.
AudioClip Crop(const AudioClip &clip, double start_s, double end_s);

}  // namespace bcast

#endif  // BCAST_AUDIO_H_
