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


// Acceptance suite. Prints one PASS/FAIL line per criterion; exits non-zero
// if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bcast/audio.h"
#include "bcast/augmenter.h"
#include "bcast/catalog.h"
#include "bcast/demo.h"
#include "bcast/error.h"
#include "bcast/manifest.h"
#include "bcast/pipeline.h"
#include "bcast/rng.h"
#include "bcast/scheduler.h"
#include "bcast/segmenter.h"
#include "bcast/textnorm.h"
#include "json.hpp"
#include "oracles.h"
#include "test_util.h"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(const char *fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double MeanSquare(const std::vector<double> &x) {
  long double acc = 0;
  for (double v : x) acc += static_cast<long double>(v) * v;
  return static_cast<double>(acc / x.size());
}

bool RelClose(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// ---------------------------------------------------------------------------
// 1. SNR fidelity.

bcast::AudioClip Draw(std::mt19937_64 &gen, std::size_t n, int kind) {
  bcast::AudioClip c;
  c.samples.resize(n);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double amp = 0.02 + 0.7 * u(gen);
  const double f = 50.0 + 3000.0 * u(gen);
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0;
    switch (kind) {
      case 0: v = amp * g(gen); break;
      case 1: v = amp * std::sin(2 * M_PI * f * i / 16000.0); break;
      case 2: v = ((i / 800) % 2 ? amp * g(gen) : 0.001 * g(gen)); break;
      default: v = amp * (u(gen) * 2 - 1); break;
    }
    c.samples[i] = static_cast<float>(v);
  }
  return c;
}

Result SnrFidelity() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(1);
  std::vector<double> requested;
  double worst = 0.0;
  int failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t ns = 1600 + gen() % 16000, nn = 400 + gen() % 32000;
    bcast::aug::Clip utt{"u", "s", "x", Draw(gen, ns, static_cast<int>(gen() % 4))};
    bcast::aug::SourcePool pool{bcast::aug::PoolRole::kNoise, {{"n", {}, {}, Draw(gen, nn, static_cast<int>(gen() % 4))}}};
    bcast::Rng rng = bcast::Rng::Derive(20240901, static_cast<std::uint64_t>(i));
    auto out = bcast::aug::ApplyMix(utt, pool, 0.0, 15.0, rng);
    const double scale = *out.peak_scale;
    std::vector<double> sig(ns), noise(ns);
    for (std::size_t k = 0; k < ns; ++k) {
      sig[k] = scale * utt.audio.samples[k];
      noise[k] = out.audio.samples[k] - sig[k];
    }
    const double measured = 10 * std::log10(MeanSquare(sig) / MeanSquare(noise));
    const double err = std::abs(measured - *out.snr_db);
    worst = std::max(worst, err);
    if (!(err <= 0.05)) ++failures;
    requested.push_back(*out.snr_db);
  }
  const double d = oracle::KsUniform(requested, 0.0, 15.0);
  const double crit = oracle::KsCritical(requested.size(), 0.01);
  const double elapsed = Seconds(t0);
  Result r;
  r.pass = failures == 0 && d < crit && elapsed < 30.0;
  r.detail = Fmt("max |measured-requested| = %.2e dB (limit 0.05), KS D = %.4f (critical %.4f), %.2f s", worst, d,
                 crit, elapsed);
  return r;
}

// ---------------------------------------------------------------------------
// 2. Segmentation oracle equivalence.

Result SegmentationOracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(2);
  const std::set<std::string> keywords = {"muziek"};
  std::size_t mismatches = 0, envelope = 0, ambiguous = 0, checked = 0;
  for (int t = 0; t < 10000; ++t) {
    auto raw_plain = oracle::RandomSegments(gen, 12, false);
    auto raw_spk = oracle::RandomSegments(gen, 12, true);
    for (const auto &v : bcast::seg::AllVariants()) {
      if (!v.required_stage) continue;
      const auto &raw = *v.required_stage == bcast::seg::Stage::kDiarized ? raw_spk : raw_plain;
      auto expected = oracle::RunVariant(v, raw, keywords, 0.0);
      if (!expected) {
        ++ambiguous;
        continue;
      }
      auto got = bcast::seg::RunVariant(v, oracle::ToSegments(raw, *v.required_stage), keywords, "m");
      std::vector<oracle::Out> mine;
      for (const auto &u : got) {
        mine.push_back({u.start_s, u.end_s, u.text, u.speaker});
        const double d = u.duration_s();
        if (!(d > 0.0 && d <= 30.0) || (v.min_len_s && d < *v.min_len_s)) ++envelope;
      }
      if (mine != *expected) ++mismatches;
      ++checked;
    }
  }
  const double elapsed = Seconds(t0);
  Result r;
  r.pass = mismatches == 0 && envelope == 0 && ambiguous == 0 && checked == 80000 && elapsed < 60.0;
  r.detail = Fmt("%zu list/variant pairs, %zu mismatches, %zu envelope violations, %zu ambiguous oracle runs, %.2f s",
                 checked, mismatches, envelope, ambiguous, elapsed);
  return r;
}

// ---------------------------------------------------------------------------
// 3. Normalization closure.

std::string Utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
  return out;
}

std::string FuzzString(std::mt19937_64 &gen) {
  static const char32_t ranges[][2] = {{0x00, 0x7F},    {0x80, 0xFF},     {0x100, 0x17F},  {0x180, 0x24F},
                                       {0x300, 0x36F},  {0x370, 0x3FF},   {0x400, 0x4FF},  {0x2000, 0x206F},
                                       {0x20A0, 0x20CF}, {0x3000, 0x303F}, {0x4E00, 0x9FFF}, {0xFF00, 0xFFEF},
                                       {0x1F300, 0x1F6FF}};
  std::string s;
  const int len = static_cast<int>(gen() % 64);
  for (int i = 0; i < len; ++i) {
    const auto pick = gen() % 100;
    if (pick < 8) {
      s += static_cast<char>(gen() % 256);  // raw byte, often invalid UTF-8
    } else if (pick < 40) {
      s += " \t\n'-.,!?"[gen() % 9];
    } else {
      const auto &r = ranges[gen() % std::size(ranges)];
      s += Utf8(r[0] + static_cast<char32_t>(gen() % (r[1] - r[0] + 1)));
    }
  }
  return s;
}

bool InAlphabet(const std::string &s) {
  if (s.empty()) return true;
  if (s.front() == ' ' || s.back() == ' ') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (!((c >= 'a' && c <= 'z') || c == '\'' || c == ' ')) return false;
    if (c == ' ' && s[i + 1] == ' ') return false;
  }
  return true;
}

Result NormalizationClosure() {
  std::mt19937_64 gen(3);
  std::size_t closure = 0, idem = 0;
  for (int t = 0; t < 100000; ++t) {
    const std::string x = FuzzString(gen);
    const std::string n = bcast::textnorm::Normalize(x);
    if (!bcast::textnorm::ValidateVocab(n) || !InAlphabet(n)) ++closure;
    if (bcast::textnorm::Normalize(n) != n) ++idem;
  }
  Result r;
  r.pass = closure == 0 && idem == 0;
  r.detail = Fmt("100000 fuzzed strings, %zu alphabet violations, %zu idempotence violations", closure, idem);
  return r;
}

// ---------------------------------------------------------------------------
// 4. Schedule endpoints.

Result ScheduleEndpoints() {
  namespace sc = bcast::sched;
  const double tol = 1e-12;
  std::vector<std::string> bad;
  auto check = [&](const char *what, double got, double want) {
    if (!RelClose(got, want, tol)) bad.push_back(Fmt("%s=%.17g want %.17g", what, got, want));
  };
  const double peak_t = 1e-4;
  sc::Schedule tri = sc::Triangular{peak_t, 25000, 25000, 0.01};
  check("tri lr(0)", sc::LrAt(tri, 0), peak_t / 100);
  check("tri lr(steps_up)", sc::LrAt(tri, 25000), peak_t);
  check("tri lr(total)", sc::LrAt(tri, 50000), peak_t / 100);
  const double peak_2 = 1e-3;
  sc::Schedule two = sc::TwoStage{peak_2, 500000, 0.10, 1e-3, 1e-2};
  check("two lr(0)", sc::LrAt(two, 0), peak_2 / 1000);
  check("two lr(warmup_end)", sc::LrAt(two, 50000), peak_2);
  check("two lr(total)", sc::LrAt(two, 500000), peak_2 / 100);
  const double factor = sc::SqrtScale(1.0, static_cast<double>(sc::TokensOf(5, 16000)),
                                      static_cast<double>(sc::TokensOf(40, 16000)));
  check("sqrt_scale(5 min->40 min)", factor, std::sqrt(8.0));
  Result r;
  r.pass = bad.empty();
  r.detail = bad.empty() ? Fmt("7 values within %.0e relative; sqrt factor %.17g", tol, factor) : bad.front();
  return r;
}

// ---------------------------------------------------------------------------
// 5. Token arithmetic.

Result TokenArithmetic() {
  const auto tokens = bcast::sched::TokensOf(5, 16000);
  Result r;
  r.pass = tokens == 4800000;
  r.detail = Fmt("tokens_of(5 min, 16 kHz) = %lld", static_cast<long long>(tokens));
  return r;
}

// ---------------------------------------------------------------------------
// 6. Catalog rules on a hand-built catalog.

struct Row {
  const char *id, *date, *title, *summary, *genre;
  double duration;
};

// Fate of each row is noted on the right; iterated filters are genre, then
// duration, then consecutive de-duplication.
const Row kCatalog50[] = {
    {"r01", "2022-01-01", "Buitenhof", "politiek", "documentaries", 1800},               // kept
    {"r02", "2022-01-01", "Buitenhof", "politiek", "documentaries", 1800},               // dup of r01
    {"r03", "2022-01-01", "Buitenhof", "politiek", "quizzes", 2400},                     // dup of r01
    {"r04", "2022-01-02", "Buitenhof", "politiek", "documentaries", 1800},               // kept, new date
    {"r05", "2022-01-02", "Nieuws", "avond", "nightly news", 1200},                      // genre
    {"r06", "2022-01-02", "Sport", "voetbal", "sports broadcasting", 5400},              // genre
    {"r07", "2022-01-03", "Lang", "marathon", "documentaries", 10801},                   // duration
    {"r08", "2022-01-03", "Precies", "grens", "documentaries", 10800},                   // kept, exactly 3 h
    {"r09", "2022-01-03", "Precies", "grens", "documentaries", 10800},                   // dup of r08
    {"r10", "2022-01-04", "Quiz", "vraag", "quizzes", 1800},                             // kept
    {"r11", "2022-01-04", "Quiz", "antwoord", "quizzes", 1800},                          // kept, new summary
    {"r12", "2022-01-04", "Quiz", "antwoord", "quizzes", 1800},                          // dup of r11
    {"r13", "2022-01-05", "Docu", "natuur", "documentaries", 3600},                      // kept
    {"r14", "2022-01-05", "Sport", "wielrennen", "sports broadcasting", 14400},          // genre and duration
    {"r15", "2022-01-05", "Docu", "natuur", "documentaries", 3600},                      // dup of r13 once r14 is gone
    {"r16", "2022-01-06", "Analyse", "economie", "in-depth news analysis", 2700},        // kept
    {"r17", "2022-01-06", " Analyse ", "economie ", "in-depth news analysis", 2700},     // dup of r16 after trim
    {"r18", "2022-01-06", "analyse", "economie", "in-depth news analysis", 2700},        // kept, case differs
    {"r19", "2022-01-07", "Journaal", "nacht", "nightly news", 900},                     // genre
    {"r20", "2022-01-07", "Journaal", "nacht", "nightly news", 900},                     // genre
    {"r21", "2022-01-08", "Film", "drama", "documentaries", 7200},                       // kept
    {"r22", "2022-01-08", "Film", "drama", "documentaries", 12000},                      // duration
    {"r23", "2022-01-08", "Film", "drama", "documentaries", 7200},                       // dup of r21 once r22 is gone
    {"r24", "2022-01-09", "Quizavond", "finale", "quizzes", 3000},                       // kept
    {"r25", "2022-01-10", "Quizavond", "finale", "quizzes", 3000},                       // kept, new date
    {"r26", "2022-01-10", "Quizavond", "finale", "quizzes", 3000},                       // dup of r25
    {"r27", "2022-01-11", "Wereld", "reportage", "in-depth news analysis", 1800},        // kept
    {"r28", "2022-01-11", "Sport", "tennis", "sports broadcasting", 1800},               // genre
    {"r29", "2022-01-11", "Sport", "tennis", "sports broadcasting", 1800},               // genre
    {"r30", "2022-01-12", "Natuur", "vogels", "documentaries", 1800},                    // kept
    {"r31", "2022-01-12", "Natuur", "vissen", "documentaries", 1800},                    // kept
    {"r32", "2022-01-12", "Natuur", "vogels", "documentaries", 1800},                    // kept, not adjacent to r30
    {"r33", "2022-01-13", "Epos", "deel 1", "documentaries", 21600},                     // duration
    {"r34", "2022-01-13", "Epos", "deel 2", "documentaries", 10799},                     // kept
    {"r35", "2022-01-14", "Debat", "verkiezing", "in-depth news analysis", 5400},        // kept
    {"r36", "2022-01-14", "Debat", "verkiezing", "in-depth news analysis", 5400},        // dup of r35
    {"r37", "2022-01-14", "Debat", "verkiezing", "in-depth news analysis", 5400},        // dup of r35
    {"r38", "2022-01-14", "Debat", "verkiezing", "in-depth news analysis", 5400},        // dup of r35
    {"r39", "2022-01-15", "Nachtnieuws", "laat", "nightly news", 600},                   // genre
    {"r40", "2022-01-15", "Kwis", "jeugd", "quizzes", 1500},                             // kept
    {"r41", "2022-01-16", "Kwis", "jeugd", "quizzes", 1500},                             // kept, new date
    {"r42", "2022-01-16", "Kwis", "", "quizzes", 1500},                                  // kept, new summary
    {"r43", "2022-01-16", "Kwis", "", "quizzes", 1500},                                  // dup of r42
    {"r44", "2022-01-17", "Olympisch", "zwemmen", "sports broadcasting", 10900},         // genre and duration
    {"r45", "2022-01-17", "Portret", "kunstenaar", "documentaries", 2400},               // kept
    {"r46", "2022-01-18", "Portret", "kunstenaar", "documentaries", 2400},               // kept, new date
    {"r47", "2022-01-18", "Marathon", "live", "documentaries", 10800.5},                 // duration
    {"r48", "2022-01-19", "Samenvatting", "week", "in-depth news analysis", 1800},       // kept
    {"r49", "2022-01-19", "Samenvatting", "week", "nightly news", 1800},                 // genre
    {"r50", "2022-01-19", "Samenvatting", "week", "in-depth news analysis", 1800},       // dup of r48 once r49 is gone
};

const std::vector<std::string> kSurvivors50 = {"r01", "r04", "r08", "r10", "r11", "r13", "r16", "r18",
                                               "r21", "r24", "r25", "r27", "r30", "r31", "r32", "r34",
                                               "r35", "r40", "r41", "r42", "r45", "r46", "r48"};

std::vector<std::string> Ids(const std::vector<bcast::catalog::BroadcastRecord> &records) {
  std::vector<std::string> out;
  for (const auto &r : records) out.push_back(r.id);
  return out;
}

Result CatalogRules() {
  namespace cat = bcast::catalog;
  std::vector<cat::BroadcastRecord> records;
  for (const auto &row : kCatalog50) {
    records.push_back({row.id, row.title, row.summary, cat::ParseDate(row.date), row.genre, row.duration,
                       std::string("media/") + row.id + ".wav"});
  }
  std::mt19937_64 gen(6);
  std::shuffle(records.begin(), records.end(), gen);
  std::sort(records.begin(), records.end(), cat::RecordLess);
  const std::set<std::string> deny = {"nightly news", "sports broadcasting"};

  auto g = cat::FilterGenre(records, {}, deny);
  auto gd = cat::FilterDuration(g);
  auto survivors = cat::DedupConsecutive(gd);
  std::vector<std::string> problems;
  if (records.size() != 50) problems.push_back("catalog does not have 50 rows");
  if (Ids(survivors) != kSurvivors50) problems.push_back("library survivor set differs");

  // Idempotence and commutation, here and on random catalogs.
  auto d = cat::FilterDuration(records);
  if (cat::FilterGenre(d, {}, deny) != gd) problems.push_back("genre/duration do not commute");
  if (cat::FilterGenre(g, {}, deny) != g) problems.push_back("genre not idempotent");
  if (cat::FilterDuration(d) != d) problems.push_back("duration not idempotent");
  if (cat::DedupConsecutive(survivors) != survivors) problems.push_back("dedup not idempotent");
  for (int t = 0; t < 500; ++t) {
    std::vector<cat::BroadcastRecord> sample;
    for (const auto &r : records) {
      if (gen() % 2) sample.push_back(r);
    }
    auto a = cat::FilterGenre(cat::FilterDuration(sample), {}, deny);
    auto b = cat::FilterDuration(cat::FilterGenre(sample, {}, deny));
    if (a != b) {
      problems.push_back("commutation fails on a random sub-catalog");
      break;
    }
    if (cat::DedupConsecutive(cat::DedupConsecutive(sample)) != cat::DedupConsecutive(sample)) {
      problems.push_back("dedup idempotence fails on a random sub-catalog");
      break;
    }
  }

  // Same catalog through the pipeline subcommand.
  testutil::TempDir dir;
  auto layout = bcast::demo::Generate(dir.path());
  std::ofstream tsv(dir / "catalog50.tsv");
  tsv << "id\ttitle\tsummary\tpublication_date\tgenre\tduration_s\tmedia_path\n";
  for (const auto &r : records) {
    tsv << r.id << '\t' << r.title << '\t' << r.summary << '\t' << r.publication_date.ToString() << '\t' << r.genre
        << '\t' << r.duration_s << '\t' << r.media_path << '\n';
  }
  tsv.close();
  nlohmann::json cfg;
  std::ifstream(layout.config) >> cfg;
  cfg["paths"]["catalog"] = "catalog50.tsv";
  auto config = bcast::pipeline::ConfigFromJson(cfg, dir.path());
  bcast::pipeline::RunCatalogFilter(config);
  std::vector<std::string> cli_ids;
  for (const auto &j : bcast::manifest::ReadJsonl(layout.output_dir / bcast::pipeline::kCatalogOut)) {
    cli_ids.push_back(j["id"].get<std::string>());
  }
  if (cli_ids != kSurvivors50) problems.push_back("catalog-filter survivor set differs");

  Result r;
  r.pass = problems.empty();
  r.detail = problems.empty() ? Fmt("50 records -> %zu survivors as enumerated; filters idempotent and commuting",
                                    survivors.size())
                              : problems.front();
  return r;
}

// ---------------------------------------------------------------------------
// 7. Augmentation exactness.

bool SameBytes(const bcast::aug::Clip &a, const bcast::aug::Clip &b) {
  return a.id == b.id && a.speaker == b.speaker && a.session == b.session &&
         a.audio.sample_rate == b.audio.sample_rate && a.audio.samples.size() == b.audio.samples.size() &&
         std::memcmp(a.audio.samples.data(), b.audio.samples.data(), a.audio.samples.size() * sizeof(float)) == 0;
}

Result AugmentationExactness() {
  namespace ag = bcast::aug;
  // round(p * N) by hand.
  const std::map<std::pair<int, int>, std::size_t> expected = {
      {{10, 10}, 1}, {{10, 33}, 3}, {{12, 10}, 1}, {{12, 33}, 4}, {{30, 10}, 3}, {{30, 33}, 10}};
  std::mt19937_64 gen(7);
  auto make = [&](std::size_t n) {
    std::vector<ag::Clip> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({"u" + std::to_string(i), "spk" + std::to_string(i % 4), "sess" + std::to_string(i % 3),
                     Draw(gen, 800 + gen() % 2400, static_cast<int>(gen() % 4))});
    }
    return out;
  };
  ag::Pools pools;
  for (auto role : {ag::PoolRole::kNoise, ag::PoolRole::kMusic, ag::PoolRole::kVocalStem,
                    ag::PoolRole::kInstrumentalStem}) {
    ag::SourcePool p{role, {}};
    for (int i = 0; i < 3; ++i) {
      p.clips.push_back({std::string(ag::RoleName(role)) + std::to_string(i), {}, {},
                         Draw(gen, 500 + gen() % 5000, i)});
    }
    pools[role] = p;
  }
  pools[ag::PoolRole::kSpeech] = ag::SourcePool{ag::PoolRole::kSpeech, make(16)};

  const ag::Mode modes[] = {ag::Mode::kTwoSpeakerMix, ag::Mode::kSubNoise, ag::Mode::kSubMusic,
                            ag::Mode::kMixNoise,      ag::Mode::kMixMusic, ag::Mode::kMixVocal,
                            ag::Mode::kMixInstrumental};
  std::vector<std::string> problems;
  std::size_t runs = 0;
  for (int n : {10, 12, 30}) {
    for (int pct : {10, 33}) {
      for (auto mode : modes) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          const auto batch = make(static_cast<std::size_t>(n));
          ag::AugmentSpec spec{mode, pct / 100.0, 0.0, 15.0, seed};
          const auto out = ag::AugmentBatch(batch, spec, pools, seed);
          const auto again = ag::AugmentBatch(batch, spec, pools, seed);
          ++runs;
          const std::size_t want = expected.at({n, pct});
          std::set<std::size_t> logged;
          for (const auto &row : out.log) {
            logged.insert(row.position);
            const bool complete = row.utterance_id == batch[row.position].id && !row.source_id.empty() &&
                                  row.mode == mode && row.batch_index == seed &&
                                  (ag::RoleFor(mode) == ag::PoolRole::kSpeech || row.offset.has_value()) &&
                                  (mode == ag::Mode::kSubNoise || mode == ag::Mode::kSubMusic ||
                                   (row.snr_db && row.gain && row.peak_scale));
            if (!complete) problems.push_back("incomplete log row");
          }
          if (out.log.size() != want || logged.size() != want) {
            problems.push_back(Fmt("N=%d p=0.%d touched %zu, want %zu", n, pct, out.log.size(), want));
          }
          for (std::size_t k = 0; k < batch.size(); ++k) {
            const bool same = SameBytes(out.items[k], batch[k]);
            if (logged.contains(k) == same) problems.push_back("touched set disagrees with log");
            if (!SameBytes(out.items[k], again.items[k])) problems.push_back("rerun not bit-identical");
          }
          if (out.log.size() != again.log.size()) problems.push_back("rerun log differs");
          for (std::size_t k = 0; k < out.log.size() && k < again.log.size(); ++k) {
            const auto &a = out.log[k], &b = again.log[k];
            if (a.position != b.position || a.source_id != b.source_id || a.snr_db != b.snr_db || a.gain != b.gain ||
                a.offset != b.offset) {
              problems.push_back("rerun log differs");
            }
          }
        }
      }
    }
  }
  Result r;
  r.pass = problems.empty();
  r.detail = problems.empty() ? Fmt("%zu batches over N in {10,12,30}, p in {0.10,0.33}, 7 modes", runs)
                              : problems.front();
  return r;
}

// ---------------------------------------------------------------------------
// 8. End-to-end demo.

int RunCli(const std::string &args, const fs::path &log) {
  const std::string cmd = std::string(BCAST_CLI) + " " + args + " >>" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Result EndToEnd() {
  testutil::TempDir dir;
  std::vector<std::string> problems;
  const auto t0 = Clock::now();
  auto layout = bcast::demo::Generate(dir.path());
  const std::string cfg = "-c " + layout.config.string() + " ";
  const fs::path log = dir / "run.log";
  for (const char *cmd : {"catalog-filter", "segment --variant w-pp-3s", "normalize", "augment", "batch", "stats"}) {
    if (RunCli(cfg + cmd, log) != 0) problems.push_back(std::string("subcommand failed: ") + cmd);
  }
  const double elapsed = Seconds(t0);
  if (!(elapsed < 120.0)) problems.push_back(Fmt("took %.1f s", elapsed));
  if (!problems.empty()) return {false, problems.front()};

  namespace pl = bcast::pipeline;
  std::map<std::string, std::string> genre_of;
  for (const auto &j : bcast::manifest::ReadJsonl(layout.output_dir / pl::kCatalogOut)) {
    genre_of[j["id"].get<std::string>()] = j["genre"].get<std::string>();
  }
  std::size_t count = 0, valid = 0, in_range = 0;
  for (const char *name : {pl::kUtterances, pl::kNormalized, pl::kAugmented}) {
    std::ifstream in(layout.output_dir / name);
    std::string first;
    std::getline(in, first);
    if (!bcast::manifest::IsHeader(nlohmann::ordered_json::parse(first))) problems.push_back("missing header");
  }
  struct Agg {
    std::size_t n = 0;
    double sum = 0, lo = 1e300, hi = 0;
    std::map<std::string, double> by_genre;
  } agg;
  for (const auto &j : bcast::manifest::ReadJsonl(layout.output_dir / pl::kAugmented)) {
    ++count;
    const std::string text = j["text"].get<std::string>();
    if (InAlphabet(text)) ++valid;
    const double duration = j["duration"].get<double>();
    const double span = j["end_s"].get<double>() - j["start_s"].get<double>();
    if (duration >= 3.0 && duration <= 30.0 && span >= 3.0 && span <= 30.0) ++in_range;
    ++agg.n;
    agg.sum += duration;
    agg.lo = std::min(agg.lo, duration);
    agg.hi = std::max(agg.hi, duration);
    agg.by_genre[genre_of.at(j["media_id"].get<std::string>())] += duration;
  }
  if (count == 0) problems.push_back("no utterances");
  if (valid != count) problems.push_back(Fmt("%zu of %zu utterances vocab-valid", valid, count));
  if (in_range != count) problems.push_back(Fmt("%zu of %zu utterances within [3, 30] s", in_range, count));

  nlohmann::json stats;
  std::ifstream(layout.output_dir / pl::kStats) >> stats;
  const double tol = 1e-12;
  if (stats["utterance_count"].get<std::size_t>() != agg.n) problems.push_back("utterance_count differs");
  if (!RelClose(stats["total_seconds"].get<double>(), agg.sum, tol)) problems.push_back("total_seconds differs");
  if (!RelClose(stats["total_hours"].get<double>(), agg.sum / 3600.0, tol)) problems.push_back("total_hours differs");
  if (!RelClose(stats["mean_duration_s"].get<double>(), agg.sum / agg.n, tol)) problems.push_back("mean differs");
  if (stats["min_duration_s"].get<double>() != agg.lo) problems.push_back("min differs");
  if (stats["max_duration_s"].get<double>() != agg.hi) problems.push_back("max differs");
  if (stats["vocab_valid"].get<std::size_t>() != valid) problems.push_back("vocab_valid differs");
  if (stats["hours_by_genre"].size() != agg.by_genre.size()) problems.push_back("genre breakdown differs");
  for (const auto &[genre, seconds] : agg.by_genre) {
    if (!stats["hours_by_genre"].contains(genre) ||
        !RelClose(stats["hours_by_genre"][genre].get<double>(), seconds / 3600.0, tol)) {
      problems.push_back("hours for " + genre + " differ");
    }
  }

  nlohmann::json plan;
  std::ifstream(layout.output_dir / pl::kPlanReport) >> plan;
  if (plan["utterances"].get<std::size_t>() != count) problems.push_back("plan does not cover the corpus");

  Result r;
  r.pass = problems.empty();
  r.detail = problems.empty()
                 ? Fmt("%zu utterances, 100%% vocab-valid, all in [3, 30] s, stats match recomputation, %.2f s", count,
                       elapsed)
                 : problems.front();
  return r;
}

// ---------------------------------------------------------------------------
// 9. WER scorer.

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Result WerScorer() {
  std::vector<std::string> problems;
  std::ifstream in(BCAST_TEST_DATA "/wer_golden.tsv");
  std::string line;
  std::size_t pairs = 0;
  std::ostringstream refs, hyps;
  std::size_t tot_errors = 0, tot_words = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitTabs(line);
    if (f.size() != 6) {
      problems.push_back("bad golden line: " + line);
      continue;
    }
    ++pairs;
    const auto w = bcast::textnorm::Wer(f[0], f[1]);
    const std::size_t s = std::stoul(f[2]), d = std::stoul(f[3]), i = std::stoul(f[4]), n = std::stoul(f[5]);
    if (w.substitutions != s || w.deletions != d || w.insertions != i || w.ref_words != n ||
        w.wer != static_cast<double>(s + d + i) / static_cast<double>(n)) {
      problems.push_back(Fmt("pair %zu: got S=%zu D=%zu I=%zu N=%zu", pairs, w.substitutions, w.deletions,
                             w.insertions, w.ref_words));
    }
    refs << f[0] << '\n';
    hyps << f[1] << '\n';
    tot_errors += s + d + i;
    tot_words += n;
  }
  if (pairs != 20) problems.push_back(Fmt("golden file has %zu pairs", pairs));

  // File-level scorer agrees.
  testutil::TempDir dir;
  testutil::WriteText(dir / "ref.txt", refs.str());
  testutil::WriteText(dir / "hyp.txt", hyps.str());
  auto total = bcast::pipeline::ScoreWerFiles(dir / "ref.txt", dir / "hyp.txt", std::nullopt);
  const std::size_t file_errors = total["substitutions"].get<std::size_t>() + total["deletions"].get<std::size_t>() +
                                  total["insertions"].get<std::size_t>();
  if (file_errors != tot_errors || total["ref_words"].get<std::size_t>() != tot_words) {
    problems.push_back("file scorer totals differ");
  }

  std::mt19937_64 gen(9);
  std::size_t fuzzed = 0, nonzero = 0;
  while (fuzzed < 10000) {
    std::string x = FuzzString(gen);
    std::string upper = x;
    for (auto &c : upper) {
      if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    if (bcast::textnorm::Normalize(x).empty()) continue;
    ++fuzzed;
    if (bcast::textnorm::Wer(x, x).wer != 0.0 || bcast::textnorm::Wer(x, upper).wer != 0.0) ++nonzero;
  }
  if (nonzero) problems.push_back(Fmt("wer(x,x) non-zero for %zu fuzzed strings", nonzero));

  Result r;
  r.pass = problems.empty();
  r.detail = problems.empty() ? Fmt("20 golden pairs exact; wer(x,x)=0 on %zu fuzzed strings (also caseless)", fuzzed)
                              : problems.front();
  return r;
}

}  // namespace

int main() {
  const std::pair<const char *, std::function<Result()>> criteria[] = {
      {"snr fidelity", SnrFidelity},
      {"segmentation oracle equivalence", SegmentationOracle},
      {"normalization closure", NormalizationClosure},
      {"schedule endpoints", ScheduleEndpoints},
      {"token arithmetic", TokenArithmetic},
      {"catalog rules", CatalogRules},
      {"augmentation exactness", AugmentationExactness},
      {"end-to-end demo", EndToEnd},
      {"wer scorer", WerScorer},
  };
  int failed = 0;
  int index = 0;
  for (const auto &[name, fn] : criteria) {
    ++index;
    Result r;
    try {
      r = fn();
    } catch (const std::exception &e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %d (%s): %s\n", r.pass ? "PASS" : "FAIL", index, name, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
