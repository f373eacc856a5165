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

#include "bcast/textnorm.h"

#include <array>
#include <cstdint>
#include <utility>

#include "bcast/error.h"

namespace bcast::textnorm {

namespace {

// Folding for U+00C0..U+017F, one entry per code point. An empty entry means
// the code point is a symbol and becomes a space.
constexpr char32_t kFoldBase = 0x00C0;
constexpr std::array<const char *, 0x0180 - 0x00C0> kFold = {
    // U+00C0
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    // U+00D0
    "d", "n", "o", "o", "o", "o", "o", "", "o", "u", "u", "u", "u", "y", "th", "ss",
    // U+00E0
    "a", "a", "a", "a", "a", "a", "ae", "c", "e", "e", "e", "e", "i", "i", "i", "i",
    // U+00F0
    "d", "n", "o", "o", "o", "o", "o", "", "o", "u", "u", "u", "u", "y", "th", "y",
    // U+0100
    "a", "a", "a", "a", "a", "a", "c", "c", "c", "c", "c", "c", "c", "c", "d", "d",
    // U+0110
    "d", "d", "e", "e", "e", "e", "e", "e", "e", "e", "e", "e", "g", "g", "g", "g",
    // U+0120
    "g", "g", "g", "g", "h", "h", "h", "h", "i", "i", "i", "i", "i", "i", "i", "i",
    // U+0130
    "i", "i", "ij", "ij", "j", "j", "k", "k", "k", "l", "l", "l", "l", "l", "l", "l",
    // U+0140
    "l", "l", "l", "n", "n", "n", "n", "n", "n", "'n", "n", "n", "o", "o", "o", "o",
    // U+0150
    "o", "o", "oe", "oe", "r", "r", "r", "r", "r", "r", "s", "s", "s", "s", "s", "s",
    // U+0160
    "s", "s", "t", "t", "t", "t", "t", "t", "u", "u", "u", "u", "u", "u", "u", "u",
    // U+0170
    "u", "u", "u", "u", "w", "w", "y", "y", "y", "z", "z", "z", "z", "z", "z", "s",
};

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at `pos`; advances `pos`. Returns kInvalid
// and consumes one byte on malformed input.
char32_t DecodeUtf8(std::string_view s, std::size_t &pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) {
    ++pos;
    return b0;
  }
  std::size_t len;
  char32_t cp;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ++pos;
    return kInvalid;
  }
  pos += len;
  return cp;
}

bool IsCombiningMark(char32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) || (cp >= 0x1AB0 && cp <= 0x1AFF) ||
         (cp >= 0x1DC0 && cp <= 0x1DFF) || (cp >= 0x20D0 && cp <= 0x20FF) ||
         (cp >= 0xFE20 && cp <= 0xFE2F);
}

bool IsApostropheLike(char32_t cp) {
  return cp == '\'' || cp == 0x2018 || cp == 0x2019 || cp == 0x02BC;
}

// Punctuation, spaces and symbol blocks that are not letters.
bool IsKnownNonLetter(char32_t cp) {
  return (cp >= 0x00A0 && cp <= 0x00BF) || cp == 0x00D7 || cp == 0x00F7 ||
         (cp >= 0x2000 && cp <= 0x2BFF) || (cp >= 0x3000 && cp <= 0x303F) ||
         (cp >= 0xFE30 && cp <= 0xFE4F) || (cp >= 0xFF00 && cp <= 0xFF0F) ||
         cp == 0xFEFF || (cp >= 0x1F000 && cp <= 0x1FAFF);
}

}  // namespace

std::string Normalize(std::string_view text, NormalizeCounters *counters) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;

  auto emit = [&](std::string_view piece) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.append(piece);
  };

  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = DecodeUtf8(text, pos);
    if (cp == kInvalid) {
      if (counters) ++counters->invalid_bytes;
      pending_space = true;
    } else if (cp >= 'a' && cp <= 'z') {
      char c = static_cast<char>(cp);
      emit(std::string_view(&c, 1));
    } else if (cp >= 'A' && cp <= 'Z') {
      char c = static_cast<char>(cp - 'A' + 'a');
      emit(std::string_view(&c, 1));
    } else if (IsApostropheLike(cp)) {
      emit("'");
    } else if (cp >= kFoldBase && cp < kFoldBase + kFold.size()) {
      std::string_view folded = kFold[cp - kFoldBase];
      if (folded.empty()) {
        pending_space = true;
      } else {
        emit(folded);
      }
    } else if (IsCombiningMark(cp)) {
      // Decomposed diacritic: the base letter was already emitted.
    } else {
      if (cp >= 0x80 && !IsKnownNonLetter(cp) && counters) ++counters->unmapped_letters;
      pending_space = true;
    }
  }
  return out;
}

bool ValidateVocab(std::string_view text) {
  if (text.empty()) return true;
  if (text.front() == ' ' || text.back() == ' ') return false;
  char prev = 0;
  for (char c : text) {
    const bool ok = (c >= 'a' && c <= 'z') || c == '\'' || c == ' ';
    if (!ok) return false;
    if (c == ' ' && prev == ' ') return false;
    prev = c;
  }
  return true;
}

std::vector<std::string> SplitWords(std::string_view normalized) {
  std::vector<std::string> words;
  std::size_t start = 0;
  while (start < normalized.size()) {
    std::size_t end = normalized.find(' ', start);
    if (end == std::string_view::npos) end = normalized.size();
    if (end > start) words.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return words;
}

WerBreakdown AlignWords(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp) {
  if (ref.empty()) throw Error(ErrorCode::kEmptyReference, "reference has no words");

  struct Cell {
    std::size_t s = 0, d = 0, i = 0;
    // Lexicographic key: fewest errors, then fewest insertions+deletions.
    std::pair<std::size_t, std::size_t> key() const { return {s + d + i, d + i}; }
  };

  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<Cell> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j].i = j;
  for (std::size_t r = 1; r <= n; ++r) {
    cur[0] = Cell{0, r, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      Cell diag = prev[j - 1];
      if (ref[r - 1] != hyp[j - 1]) ++diag.s;
      Cell del = prev[j];
      ++del.d;
      Cell ins = cur[j - 1];
      ++ins.i;
      Cell best = diag;
      if (del.key() < best.key()) best = del;
      if (ins.key() < best.key()) best = ins;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }

  const Cell &last = prev[m];
  WerBreakdown out;
  out.substitutions = last.s;
  out.deletions = last.d;
  out.insertions = last.i;
  out.ref_words = n;
  out.wer = static_cast<double>(out.errors()) / static_cast<double>(n);
  return out;
}

WerBreakdown Wer(std::string_view reference, std::string_view hypothesis) {
  return AlignWords(SplitWords(Normalize(reference)), SplitWords(Normalize(hypothesis)));
}

}  // namespace bcast::textnorm
