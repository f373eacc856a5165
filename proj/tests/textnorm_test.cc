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


#include <random>
#include <string>

#include "bcast/error.h"
#include "bcast/textnorm.h"
#include "doctest.h"

namespace tn = bcast::textnorm;

namespace {

// Independent alphabet check.
bool InAlphabet(const std::string &s) {
  if (s.empty()) return true;
  if (s.front() == ' ' || s.back() == ' ') return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    const bool ok = (c >= 'a' && c <= 'z') || c == '\'' || c == ' ';
    if (!ok) return false;
    if (c == ' ' && i + 1 < s.size() && s[i + 1] == ' ') return false;
  }
  return true;
}

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

}  // namespace

TEST_CASE("normalize: examples") {
  CHECK(tn::Normalize("Crème brûlée!") == "creme brulee");
  CHECK(tn::Normalize("'s-Gravenhage") == "'s gravenhage");
  CHECK(tn::Normalize("") == "");
  CHECK(tn::Normalize("   ") == "");
  CHECK(tn::Normalize("Hallo,   Wereld.") == "hallo wereld");
  CHECK(tn::Normalize("Straße") == "strasse");
  CHECK(tn::Normalize("ĳsje") == "ijsje");
  CHECK(tn::Normalize("Ĳssel") == "ijssel");
  CHECK(tn::Normalize("zo’n") == "zo'n");
  CHECK(tn::Normalize("om 10 uur") == "om uur");
  CHECK(tn::Normalize("e\xCC\x81\xC3\xA9n") == "een");  // combining acute then precomposed
  CHECK(tn::Normalize("naïef coöperatie") == "naief cooperatie");
  CHECK(tn::Normalize("Æsop Œuvre") == "aesop oeuvre");
}

TEST_CASE("normalize: unmapped letters and invalid bytes are counted") {
  tn::NormalizeCounters counters;
  CHECK(tn::Normalize("Привет wereld", &counters) == "wereld");
  CHECK(counters.unmapped_letters == 6);
  tn::NormalizeCounters bad;
  CHECK(tn::Normalize("ab\xFF" "cd", &bad) == "ab cd");
  CHECK(bad.invalid_bytes == 1);
  tn::NormalizeCounters punct;
  CHECK(tn::Normalize("“quote” \xE2\x80\x94 dash…", &punct) == "quote dash");
  CHECK(punct.unmapped_letters == 0);
}

TEST_CASE("validate_vocab: examples") {
  CHECK(tn::ValidateVocab("hallo wereld"));
  CHECK_FALSE(tn::ValidateVocab("héllo"));
  CHECK_FALSE(tn::ValidateVocab("dubbel  spatie"));
  CHECK_FALSE(tn::ValidateVocab(" lead"));
  CHECK_FALSE(tn::ValidateVocab("trail "));
  CHECK_FALSE(tn::ValidateVocab("Hoofd"));
  CHECK(tn::ValidateVocab("'s avonds"));
  CHECK(tn::ValidateVocab(""));
}

TEST_CASE("normalize: fuzzed closure and idempotence") {
  std::mt19937_64 gen(11);
  const char32_t ranges[][2] = {{0x20, 0x7E}, {0xA0, 0x17F}, {0x300, 0x36F}, {0x2010, 0x2030},
                                {0x400, 0x44F}, {0x4E00, 0x4E20}, {0x1F600, 0x1F610}};
  for (int t = 0; t < 5000; ++t) {
    std::string s;
    const int len = static_cast<int>(gen() % 40);
    for (int i = 0; i < len; ++i) {
      if (gen() % 20 == 0) {
        s += static_cast<char>(gen() % 256);
        continue;
      }
      const auto &r = ranges[gen() % std::size(ranges)];
      s += Utf8(r[0] + static_cast<char32_t>(gen() % (r[1] - r[0] + 1)));
    }
    const std::string n = tn::Normalize(s);
    CHECK(InAlphabet(n));
    CHECK(tn::ValidateVocab(n));
    CHECK(tn::Normalize(n) == n);
  }
}

TEST_CASE("wer: examples") {
  auto same = tn::Wer("de kat zat op de mat", "de kat zat op de mat");
  CHECK(same.wer == 0.0);
  CHECK(same.errors() == 0);
  auto sub = tn::Wer("de kat zat", "de hond zat");
  CHECK(sub.substitutions == 1);
  CHECK(sub.deletions == 0);
  CHECK(sub.insertions == 0);
  CHECK(sub.wer == doctest::Approx(1.0 / 3.0));
  auto del = tn::Wer("een twee drie vier", "");
  CHECK(del.deletions == 4);
  CHECK(del.wer == 1.0);
  auto ins = tn::Wer("een", "een twee drie");
  CHECK(ins.insertions == 2);
  CHECK(ins.wer == 2.0);
  CHECK(tn::Wer("De KAT, zat.", "de kat zat").wer == 0.0);
  CHECK_THROWS_AS(tn::Wer("", "iets"), bcast::Error);
  CHECK_THROWS_AS(tn::Wer(" ?! ", "iets"), bcast::Error);
}

TEST_CASE("wer: length lower bound and zero iff equal") {
  std::mt19937_64 gen(12);
  const char *words[] = {"a", "b", "c", "d"};
  for (int t = 0; t < 3000; ++t) {
    std::vector<std::string> ref, hyp;
    for (std::size_t i = 1 + gen() % 8; i > 0; --i) ref.push_back(words[gen() % 4]);
    for (std::size_t i = gen() % 9; i > 0; --i) hyp.push_back(words[gen() % 4]);
    auto w = tn::AlignWords(ref, hyp);
    const double diff = std::abs(static_cast<double>(ref.size()) - static_cast<double>(hyp.size()));
    CHECK(w.wer >= diff / ref.size() - 1e-15);
    CHECK(w.wer == static_cast<double>(w.errors()) / ref.size());
    CHECK((w.wer == 0.0) == (ref == hyp));
    CHECK(w.substitutions + w.deletions <= ref.size());
    CHECK(static_cast<long>(hyp.size()) ==
          static_cast<long>(ref.size()) - static_cast<long>(w.deletions) + static_cast<long>(w.insertions));
  }
}
