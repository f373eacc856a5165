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

#include "bcast/audio.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "bcast/error.h"

namespace bcast {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t Le16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t Le32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutLe16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void PutLe32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct WavFormat {
  std::uint16_t tag = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

AudioClip ReadPcm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadableFile, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string where = " in " + path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorCode::kUnreadableFile, "not a RIFF/WAVE file" + where);
  }

  WavFormat fmt;
  bool have_fmt = false;
  const unsigned char *data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::size_t size = Le32(chunk + 4);
    std::size_t body = pos + 8;
    std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || size > available)
        throw Error(ErrorCode::kUnreadableFile, "truncated fmt chunk" + where);
      const unsigned char *f = bytes.data() + body;
      fmt.tag = Le16(f);
      fmt.channels = Le16(f + 2);
      fmt.sample_rate = Le32(f + 4);
      fmt.bits = Le16(f + 14);
      if (fmt.tag == kFormatExtensible) {
        if (size < 26)
          throw Error(ErrorCode::kUnreadableFile, "truncated extensible fmt" + where);
        // First two bytes of the sub-format GUID carry the format tag.
        fmt.tag = Le16(f + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      // Streaming writers leave the size unset; take what is present.
      data_size = std::min(size, available);
      break;
    }
    pos = body + size + (size & 1);
  }
  if (!have_fmt || data == nullptr)
    throw Error(ErrorCode::kUnreadableFile, "missing fmt or data chunk" + where);

  const bool int16 = fmt.tag == kFormatPcm && fmt.bits == 16;
  const bool float32 = fmt.tag == kFormatFloat && fmt.bits == 32;
  if (!int16 && !float32) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                "format tag " + std::to_string(fmt.tag) + " with " +
                    std::to_string(fmt.bits) + " bits" + where);
  }
  if (fmt.channels != 1 && fmt.channels != 2) {
    throw Error(ErrorCode::kUnsupportedEncoding,
                std::to_string(fmt.channels) + " channels" + where);
  }
  if (fmt.sample_rate == 0)
    throw Error(ErrorCode::kUnreadableFile, "zero sample rate" + where);

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame = bytes_per_sample * fmt.channels;
  const std::size_t frames = data_size / frame;

  auto sample_at = [&](std::size_t index) -> float {
    const unsigned char *p = data + index * bytes_per_sample;
    if (int16) {
      return static_cast<float>(static_cast<std::int16_t>(Le16(p))) / 32768.0f;
    }
    std::uint32_t bits = Le32(p);
    float v;
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v))
      throw Error(ErrorCode::kUnreadableFile, "non-finite sample" + where);
    return v;
  };

  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt.sample_rate);
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    if (fmt.channels == 1) {
      clip.samples[i] = sample_at(i);
    } else {
      clip.samples[i] = (sample_at(2 * i) + sample_at(2 * i + 1)) * 0.5f;
    }
  }
  return clip;
}

void WritePcm(const std::filesystem::path &path, const AudioClip &clip,
              PcmFormat format) {
  const bool int16 = format == PcmFormat::kInt16;
  const std::uint16_t bits = int16 ? 16 : 32;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(clip.samples.size() * (bits / 8));

  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  PutLe32(out, 36 + data_size);
  out.append("WAVEfmt ");
  PutLe32(out, 16);
  PutLe16(out, int16 ? kFormatPcm : kFormatFloat);
  PutLe16(out, 1);
  PutLe32(out, static_cast<std::uint32_t>(clip.sample_rate));
  PutLe32(out, static_cast<std::uint32_t>(clip.sample_rate) * (bits / 8));
  PutLe16(out, bits / 8);
  PutLe16(out, bits);
  out.append("data");
  PutLe32(out, data_size);
  for (float s : clip.samples) {
    if (int16) {
      long v = std::lround(static_cast<double>(s) * 32768.0);
      v = std::clamp(v, -32768L, 32767L);
      PutLe16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    } else {
      std::uint32_t b;
      std::memcpy(&b, &s, sizeof b);
      PutLe32(out, b);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::kIoError, "cannot open " + path.string() + " for writing");
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

double RmsPower(const AudioClip &clip) {
  if (clip.empty()) throw Error(ErrorCode::kEmptyClip, "power of empty clip");
  double acc = 0.0;
  for (float s : clip.samples) acc += static_cast<double>(s) * s;
  return acc / static_cast<double>(clip.samples.size());
}

double MeasureSnrDb(const AudioClip &signal, const AudioClip &noise) {
  const double ps = RmsPower(signal);
  const double pn = RmsPower(noise);
  if (ps <= 0.0 || pn <= 0.0)
    throw Error(ErrorCode::kSilentInput, "SNR undefined for silent input");
  return 10.0 * std::log10(ps / pn);
}

AudioClip MatchLength(const AudioClip &source, std::size_t length, Rng &rng,
                      std::size_t *offset) {
  if (source.empty()) throw Error(ErrorCode::kEmptyClip, "cannot length-match an empty clip");
  AudioClip out;
  out.sample_rate = source.sample_rate;
  std::size_t start = 0;
  if (source.size() > length) {
    start = static_cast<std::size_t>(rng.Below(source.size() - length + 1));
    out.samples.assign(source.samples.begin() + static_cast<std::ptrdiff_t>(start),
                       source.samples.begin() + static_cast<std::ptrdiff_t>(start + length));
  } else {
    out.samples.resize(length);
    for (std::size_t i = 0; i < length; ++i) out.samples[i] = source.samples[i % source.size()];
  }
  if (offset != nullptr) *offset = start;
  return out;
}

MixResult MixAtSnr(const AudioClip &signal, const AudioClip &noise,
                   double snr_db, Rng &rng) {
  if (signal.sample_rate != noise.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                std::to_string(signal.sample_rate) + " vs " +
                    std::to_string(noise.sample_rate));
  }
  if (signal.empty()) throw Error(ErrorCode::kEmptyClip, "empty signal");
  if (noise.empty()) throw Error(ErrorCode::kEmptyClip, "empty noise");
  if (!std::isfinite(snr_db)) throw Error(ErrorCode::kInvalidArgument, "non-finite SNR");
  const double ps = RmsPower(signal);
  if (ps <= 0.0) throw Error(ErrorCode::kSilentInput, "silent signal");

  MixResult result;
  AudioClip matched = MatchLength(noise, signal.size(), rng, &result.noise_offset);
  const double pn = RmsPower(matched);
  if (pn <= 0.0) throw Error(ErrorCode::kSilentInput, "silent noise");

  result.noise_gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));

  std::vector<double> mixed(signal.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = static_cast<double>(signal.samples[i]) +
               result.noise_gain * static_cast<double>(matched.samples[i]);
    peak = std::max(peak, std::abs(mixed[i]));
  }
  if (peak > 1.0) result.peak_scale = 1.0 / peak;

  result.mixture.sample_rate = signal.sample_rate;
  result.mixture.samples.resize(mixed.size());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    result.mixture.samples[i] = static_cast<float>(mixed[i] * result.peak_scale);
  }
  return result;
}

AudioClip Concat(const AudioClip &a, const AudioClip &b) {
  if (a.sample_rate != b.sample_rate) {
    throw Error(ErrorCode::kSampleRateMismatch,
                std::to_string(a.sample_rate) + " vs " + std::to_string(b.sample_rate));
  }
  AudioClip out;
  out.sample_rate = a.sample_rate;
  out.samples.reserve(a.size() + b.size());
  out.samples.insert(out.samples.end(), a.samples.begin(), a.samples.end());
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

AudioClip Crop(const AudioClip &clip, double start_s, double end_s) {
  if (!(start_s >= 0.0) || !(end_s > start_s)) {
    throw Error(ErrorCode::kOutOfRange,
                "invalid span [" + std::to_string(start_s) + ", " + std::to_string(end_s) + "]");
  }
  const auto begin = static_cast<std::size_t>(std::llround(start_s * clip.sample_rate));
  const auto end = static_cast<std::size_t>(std::llround(end_s * clip.sample_rate));
  if (end > clip.size() || begin >= end) {
    throw Error(ErrorCode::kOutOfRange,
                "span [" + std::to_string(start_s) + ", " + std::to_string(end_s) +
                    "] outside clip of " + std::to_string(clip.duration_s()) + " s");
  }
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.assign(clip.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     clip.samples.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

}  // namespace bcast
