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

#ifndef BCAST_SEGMENTER_H_
#define BCAST_SEGMENTER_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bcast/audio.h"

namespace bcast::seg {

inline constexpr double kMaxUtteranceS = 30.0;

enum class Stage { kAsr, kAligned, kDiarized };

std::string_view StageName(Stage stage);
Stage ParseStage(std::string_view name);

/// One timed span emitted by an external ASR, alignment or diarization stage.
struct TranscriptSegment {
  std::string media_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<std::string> speaker;
  Stage stage = Stage::kAsr;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const TranscriptSegment &) const = default;
};

struct Utterance {
  std::string id;
  std::string media_id;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string text;
  std::optional<std::string> speaker;

  double duration_s() const { return end_s - start_s; }
  bool operator==(const Utterance &) const = default;
};

enum class MergeMode { kNone, kPunctuation, kSpeaker };

enum class VariantName {
  kWRaw,
  kWPp1s,
  kWPp3s,
  kWxAsr,
  kWxAlign,
  kWxDiar,
  kWxDiar1s,
  kWxDiar3s,
  kSequential,
};

struct SegmentationVariant {
  VariantName name;
  std::string_view label;
  // Present for the post-processed variants only.
  std::optional<double> min_len_s;
  MergeMode merge_mode;
  // Empty for `sequential`, which ignores transcripts.
  std::optional<Stage> required_stage;
};

/// The fixed variant table; `label` is the variant's command-line name.
const std::vector<SegmentationVariant> &AllVariants();
const SegmentationVariant &GetVariant(VariantName name);
const SegmentationVariant &ParseVariant(std::string_view label);

// Keyword comparison trims surrounding whitespace and lowercases ASCII.
std::string KeywordKey(std::string_view text);

std::vector<TranscriptSegment> KeywordFilter(const std::vector<TranscriptSegment> &segments,
                                             const std::set<std::string> &keywords);

/// True when the text, ignoring trailing whitespace, ends in '.', '!' or '?'.
bool EndsWithSentencePunctuation(std::string_view text);

/// Accumulates consecutive segments until the joined text ends with sentence
/// punctuation. A group is closed early when the next segment would stretch
/// its span past `max_len_s`; a trailing unpunctuated group is kept.
std::vector<TranscriptSegment> MergeUntilPunctuation(
    const std::vector<TranscriptSegment> &segments, double max_len_s = kMaxUtteranceS);

/// Merges runs of same-speaker segments, closing on a speaker change or when
/// the span would exceed `max_len_s`.
std::vector<TranscriptSegment> MergeOnSpeaker(const std::vector<TranscriptSegment> &segments,
                                              double max_len_s = kMaxUtteranceS);

/// Keeps segments with duration >= min_s.
std::vector<TranscriptSegment> MinLengthFilter(const std::vector<TranscriptSegment> &segments,
                                               double min_s);

/// Runs one variant on the segments of a single media file. `media_id` and
/// `media_duration_s` are needed by `sequential` only; other variants take
/// the id from the segments. Utterance ids are "<media_id>-<index>".
std::vector<Utterance> RunVariant(const SegmentationVariant &variant,
                                  const std::vector<TranscriptSegment> &segments,
                                  const std::set<std::string> &keywords,
                                  std::string_view media_id = {},
                                  std::optional<double> media_duration_s = std::nullopt);

std::vector<AudioClip> ExtractUtteranceAudio(const AudioClip &media,
                                             const std::vector<Utterance> &utterances);

// Throws kUnsortedInput unless segments share one media id, are sorted by
// start and do not overlap, and have start < end.
void CheckOrdered(const std::vector<TranscriptSegment> &segments);

}  // namespace bcast::seg

#endif  // BCAST_SEGMENTER_H_
