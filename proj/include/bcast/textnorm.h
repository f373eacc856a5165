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

#ifndef BCAST_TEXTNORM_H_
#define BCAST_TEXTNORM_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace bcast::textnorm {

struct NormalizeCounters {
  // Letters outside the folding table, replaced by a space.
  std::size_t unmapped_letters = 0;
  // Bytes that did not form valid UTF-8.
  std::size_t invalid_bytes = 0;
};

/// Maps UTF-8 text onto lowercase a-z, apostrophe and single spaces.
///
/// Diacritics are folded to their base letter (Latin-1 Supplement and
/// Latin Extended-A), ligatures expand ("ĳ" -> "ij", "ß" -> "ss"),
/// typographic apostrophes become "'", and everything else (punctuation,
/// hyphens, digits, symbols) becomes a space. Whitespace runs collapse and
/// the result is trimmed.
std::string Normalize(std::string_view text, NormalizeCounters *counters = nullptr);

/// True iff `text` only uses a-z, apostrophe and space, with no leading,
/// trailing or doubled spaces.
bool ValidateVocab(std::string_view text);

std::vector<std::string> SplitWords(std::string_view normalized);

struct WerBreakdown {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_words = 0;
  double wer = 0.0;

  std::size_t errors() const { return substitutions + deletions + insertions; }
};

/// Caseless word error rate; both sides are normalized first. Among minimal
/// alignments, the one with the most substitutions is reported.
WerBreakdown Wer(std::string_view reference, std::string_view hypothesis);

/// Word-level alignment of already-split sequences.
WerBreakdown AlignWords(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp);

}  // namespace bcast::textnorm

#endif  // BCAST_TEXTNORM_H_
