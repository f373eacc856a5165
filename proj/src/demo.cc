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

#include "bcast/demo.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "bcast/audio.h"
#include "bcast/error.h"
#include "bcast/manifest.h"
#include "bcast/rng.h"

namespace bcast::demo {

namespace fs = std::filesystem;
using manifest::Json;

namespace {

constexpr int kRate = 16000;

const char *const kSentences[] = {
    "Goedenavond en welkom bij de uitzending van vandaag.",
    "In 's-Hertogenbosch is de coöperatie opnieuw geopend.",
    "De ministers bespraken de begroting tot diep in de nacht.",
    "Wat vindt u van de nieuwe plannen voor het café?",
    "Het museum ontving in 1998 meer dan 2.000 bezoekers!",
    "Na de pauze praten we verder over de ruïne in Zeeland.",
    "Één ding is zeker: de quiz is nog niet voorbij.",
    "Crème brûlée staat vanavond op het menu.",
    "Zij woonde jarenlang in het mooie Noord-Brabant.",
    "Dat is een uitstekende vraag, zegt de presentator.",
    "Hoe gaat het met de coördinatie van de hulpdiensten?",
    "Wij hebben de documentaire over de Waddenzee gemaakt.",
    "De kandidaat weet het antwoord niet en kijkt naar het publiek!",
    "Volgende week bespreken we de verkiezingen in Friesland.",
};

const char *const kGenres[] = {"documentaries", "quizzes", "in-depth news analysis"};

std::vector<std::string> SplitWords(const std::string &s) {
  std::vector<std::string> words;
  std::istringstream in(s);
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

std::string Join(const std::vector<std::string> &words, std::size_t from, std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += words[i];
  }
  return out;
}

double Round2(double v) { return std::round(v * 100.0) / 100.0; }

struct Span {
  double start;
  double end;
  std::string text;
  int speaker;  // -1 for non-speech
};

void Tone(std::vector<float> &samples, double start, double end, double f0, double amp) {
  const auto b = static_cast<std::size_t>(std::llround(start * kRate));
  const auto e = std::min(samples.size(), static_cast<std::size_t>(std::llround(end * kRate)));
  for (std::size_t i = b; i < e; ++i) {
    const double t = static_cast<double>(i) / kRate;
    // Syllable-rate envelope over a few harmonics.
    const double env = 0.55 + 0.45 * std::sin(2.0 * std::numbers::pi * 4.0 * t);
    double v = 0.0;
    for (int h = 1; h <= 4; ++h) v += std::sin(2.0 * std::numbers::pi * f0 * h * t) / h;
    samples[i] = static_cast<float>(samples[i] + amp * env * v / 2.1);
  }
}

void Chord(std::vector<float> &samples, double start, double end, double amp) {
  const auto b = static_cast<std::size_t>(std::llround(start * kRate));
  const auto e = std::min(samples.size(), static_cast<std::size_t>(std::llround(end * kRate)));
  for (std::size_t i = b; i < e; ++i) {
    const double t = static_cast<double>(i) / kRate;
    const double v = std::sin(2 * std::numbers::pi * 261.6 * t) + std::sin(2 * std::numbers::pi * 329.6 * t) +
                     std::sin(2 * std::numbers::pi * 392.0 * t);
    samples[i] = static_cast<float>(samples[i] + amp * v / 3.0);
  }
}

AudioClip Noise(Rng &rng, double seconds, double amp, bool brown) {
  AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.resize(static_cast<std::size_t>(seconds * kRate));
  double state = 0.0;
  for (auto &s : clip.samples) {
    const double white = rng.Uniform(-1.0, 1.0);
    state = brown ? 0.98 * state + 0.2 * white : white;
    s = static_cast<float>(std::clamp(amp * state, -1.0, 1.0));
  }
  return clip;
}

void WriteLines(const fs::path &path, const std::vector<Json> &records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto &r : records) out << r.dump() << '\n';
}

}  // namespace

DemoLayout Generate(const fs::path &dir, std::uint64_t seed) {
  DemoLayout layout;
  layout.root = dir;
  fs::create_directories(dir / "media");
  fs::create_directories(dir / "stages");
  fs::create_directories(dir / "pools");
  Rng rng(seed);

  std::vector<Json> asr, aligned, diarized;
  std::ostringstream catalog;
  catalog << "id\ttitle\tsummary\tpublication_date\tgenre\tduration_s\tmedia_path\n";

  for (int m = 0; m < kMediaFiles; ++m) {
    char id_buf[16];
    std::snprintf(id_buf, sizeof id_buf, "b%04d", m + 1);
    const std::string id = id_buf;
    const double duration = 60.0 + 7.0 * m;

    AudioClip media = Noise(rng, duration, 0.002, false);
    std::vector<Span> spans;
    double t = 0.5 + rng.Uniform(0.0, 0.5);
    int speaker = 0;
    while (true) {
      const double kind = rng.Uniform01();
      if (kind < 0.12) {
        const double len = Round2(rng.Uniform(2.0, 6.0));
        if (t + len > duration - 0.5) break;
        spans.push_back({Round2(t), Round2(t + len), rng.Uniform01() < 0.5 ? "muziek" : " Muziek ", -1});
        t += len + rng.Uniform(0.2, 0.8);
        continue;
      }
      if (kind < 0.22) {
        const double len = Round2(rng.Uniform(0.6, 1.6));
        if (t + len > duration - 0.5) break;
        spans.push_back({Round2(t), Round2(t + len), rng.Uniform01() < 0.5 ? "Ja." : "Precies!", speaker});
        t += len + rng.Uniform(0.2, 0.8);
        continue;
      }
      if (rng.Uniform01() < 0.4) speaker = 1 - speaker;
      const auto words = SplitWords(kSentences[rng.Below(std::size(kSentences))]);
      const std::size_t chunks = 1 + static_cast<std::size_t>(rng.Below(3));
      std::vector<std::pair<std::size_t, std::size_t>> bounds;
      for (std::size_t c = 0; c < chunks; ++c) {
        bounds.emplace_back(words.size() * c / chunks, words.size() * (c + 1) / chunks);
      }
      double needed = 0.0;
      std::vector<double> lens;
      for (auto [a, b] : bounds) {
        lens.push_back(Round2(0.38 * static_cast<double>(b - a) + rng.Uniform(0.2, 0.8)));
        needed += lens.back() + 0.6;
      }
      if (t + needed > duration - 0.5) break;
      for (std::size_t c = 0; c < chunks; ++c) {
        spans.push_back({Round2(t), Round2(t + lens[c]), Join(words, bounds[c].first, bounds[c].second), speaker});
        t = Round2(t + lens[c]) + Round2(rng.Uniform(0.05, 0.5));
      }
      t += rng.Uniform(0.2, 1.0);
    }

    const double f0[2] = {115.0 + 3.0 * m, 205.0 + 5.0 * m};
    for (const auto &s : spans) {
      if (s.speaker < 0) {
        Chord(media.samples, s.start, s.end, 0.25);
      } else {
        Tone(media.samples, s.start, s.end, f0[s.speaker], 0.3);
      }
    }
    WritePcm(dir / "media" / (id + ".wav"), media, PcmFormat::kInt16);

    for (const auto &s : spans) {
      Json a;
      a["media_id"] = id;
      a["start_s"] = s.start;
      a["end_s"] = s.end;
      a["text"] = s.text;
      a["stage"] = "asr";
      asr.push_back(a);

      Json al = a;
      al["start_s"] = Round2(s.start + 0.05);
      al["end_s"] = Round2(s.end - 0.05);
      al["stage"] = "aligned";
      aligned.push_back(al);

      Json d = al;
      d["speaker"] = s.speaker == 1 ? "SPEAKER_01" : "SPEAKER_00";
      d["stage"] = "diarized";
      diarized.push_back(d);
    }

    char date[16];
    std::snprintf(date, sizeof date, "2021-03-%02d", m + 1);
    catalog << id << "\tUitzending " << (m + 1) << "\tAflevering " << (m + 1) << " van de reeks\t" << date
            << '\t' << kGenres[m % 3] << '\t' << duration << "\tmedia/" << id << ".wav\n";

    if (m == 4) {
      // Re-broadcast row: same title, summary and date as the row above.
      catalog << "b0013\tUitzending 5\tAflevering 5 van de reeks\t" << date << "\tquizzes\t" << duration
              << "\tmedia/" << id << ".wav\n";
    }
  }
  catalog << "b0011\tAvondjournaal\tHet nieuws van vandaag\t2021-03-20\tnightly news\t1800\tmedia/absent-news.wav\n";
  catalog << "b0012\tSportzomer\tLive verslag\t2021-03-21\tsports broadcasting\t7200\tmedia/absent-sport.wav\n";
  catalog << "b0014\tMarathonuitzending\tDe hele dag live\t2021-03-22\tdocumentaries\t14400\tmedia/absent-long.wav\n";

  layout.catalog = dir / "catalog.tsv";
  {
    std::ofstream out(layout.catalog, std::ios::trunc);
    out << catalog.str();
  }
  layout.stage_asr = dir / "stages" / "asr.jsonl";
  layout.stage_aligned = dir / "stages" / "aligned.jsonl";
  layout.stage_diarized = dir / "stages" / "diarized.jsonl";
  WriteLines(layout.stage_asr, asr);
  WriteLines(layout.stage_aligned, aligned);
  WriteLines(layout.stage_diarized, diarized);

  // Source pools.
  std::vector<Json> pools;
  auto add_pool = [&](const std::string &name, const std::string &role, const AudioClip &clip) {
    WritePcm(dir / "pools" / (name + ".wav"), clip, PcmFormat::kInt16);
    Json j;
    j["id"] = name;
    j["path"] = "pools/" + name + ".wav";
    j["role"] = role;
    pools.push_back(j);
  };
  add_pool("noise-white", "noise", Noise(rng, 20.0, 0.3, false));
  add_pool("noise-brown", "noise", Noise(rng, 7.0, 0.5, true));
  {
    AudioClip music;
    music.sample_rate = kRate;
    music.samples.assign(25 * kRate, 0.0f);
    Chord(music.samples, 0.0, 25.0, 0.4);
    add_pool("music-chords", "music", music);
    AudioClip vocal;
    vocal.sample_rate = kRate;
    vocal.samples.assign(12 * kRate, 0.0f);
    Tone(vocal.samples, 0.0, 12.0, 330.0, 0.4);
    add_pool("stem-vocal", "vocal-stem", vocal);
    add_pool("stem-instr", "instrumental-stem", music);
  }
  layout.pools = dir / "pools.jsonl";
  WriteLines(layout.pools, pools);

  nlohmann::ordered_json config;
  config["seed"] = seed;
  config["workers"] = 1;
  config["sample_rate"] = kRate;
  config["paths"] = {{"catalog", "catalog.tsv"},
                     {"stage_manifests", {"stages/asr.jsonl", "stages/aligned.jsonl", "stages/diarized.jsonl"}},
                     {"pools", "pools.jsonl"},
                     {"output_dir", "out"}};
  config["catalog"] = {{"allow_genres", nlohmann::json::array()},
                       {"deny_genres", {"nightly news", "sports broadcasting"}},
                       {"max_duration_s", 10800}};
  config["segment"] = {{"variant", "w-pp-3s"}, {"keywords", {"muziek"}}};
  config["augment"] = {{"mode", "mix-noise"}, {"fraction", 0.10}, {"snr_range_db", {0, 15}}, {"batch_size", 30}};
  config["batch"] = {{"budget_minutes", 5}};
  config["schedules"] = nlohmann::ordered_json::array(
      {{{"kind", "triangular"}, {"peak_lr", 1e-4}, {"steps_up", 25000}, {"steps_down", 25000}, {"stride", 500}},
       {{"kind", "two-stage"},
        {"peak_lr_from_batch", {{"reference_lr", 5e-4}, {"reference_minutes", 5}, {"minutes", 40}}},
        {"total_steps", 500000},
        {"stride", 5000}},
       {{"kind", "tri-stage"},
        {"init_lr", 5e-7},
        {"hold_lr", 5e-5},
        {"final_lr", 2.5e-6},
        {"total_steps", 80000},
        {"phase_fractions", {0.1, 0.4, 0.5}},
        {"stride", 1000}}});
  layout.config = dir / "config.json";
  {
    std::ofstream out(layout.config, std::ios::trunc);
    out << config.dump(2) << '\n';
  }
  layout.output_dir = dir / "out";
  return layout;
}

}  // namespace bcast::demo
