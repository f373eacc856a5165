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

#include "bcast/segmenter.h"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "bcast/error.h"

namespace bcast::seg {

namespace {

std::string_view Trim(std::string_view s) {
  const auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Accumulates consecutive segments into one span.
class Group {
 public:
  bool empty() const { return !open_; }
  double start() const { return seg_.start_s; }

  void Add(const TranscriptSegment &s) {
    std::string_view piece = Trim(s.text);
    if (!open_) {
      seg_ = s;
      seg_.text = std::string(piece);
      open_ = true;
      return;
    }
    seg_.end_s = s.end_s;
    if (!piece.empty()) {
      if (!seg_.text.empty()) seg_.text.push_back(' ');
      seg_.text.append(piece);
    }
    if (seg_.speaker != s.speaker) seg_.speaker.reset();
  }

  const std::string &text() const { return seg_.text; }

  void FlushTo(std::vector<TranscriptSegment> &out) {
    if (open_) out.push_back(std::move(seg_));
    open_ = false;
    seg_ = {};
  }

 private:
  TranscriptSegment seg_;
  bool open_ = false;
};

}  // namespace

std::string_view StageName(Stage stage) {
  switch (stage) {
    case Stage::kAsr: return "asr";
    case Stage::kAligned: return "aligned";
    case Stage::kDiarized: return "diarized";
  }
  return "asr";
}

Stage ParseStage(std::string_view name) {
  if (name == "asr") return Stage::kAsr;
  if (name == "aligned") return Stage::kAligned;
  if (name == "diarized") return Stage::kDiarized;
  throw Error(ErrorCode::kParseError, "unknown stage '" + std::string(name) + "'");
}

const std::vector<SegmentationVariant> &AllVariants() {
  static const std::vector<SegmentationVariant> kVariants = {
      {VariantName::kWRaw, "w-raw", std::nullopt, MergeMode::kNone, Stage::kAsr},
      {VariantName::kWPp1s, "w-pp-1s", 1.0, MergeMode::kPunctuation, Stage::kAsr},
      {VariantName::kWPp3s, "w-pp-3s", 3.0, MergeMode::kPunctuation, Stage::kAsr},
      {VariantName::kWxAsr, "wx-asr", std::nullopt, MergeMode::kNone, Stage::kAsr},
      {VariantName::kWxAlign, "wx-align", std::nullopt, MergeMode::kNone, Stage::kAligned},
      {VariantName::kWxDiar, "wx-diar", std::nullopt, MergeMode::kNone, Stage::kDiarized},
      {VariantName::kWxDiar1s, "wx-diar-1s", 1.0, MergeMode::kSpeaker, Stage::kDiarized},
      {VariantName::kWxDiar3s, "wx-diar-3s", 3.0, MergeMode::kSpeaker, Stage::kDiarized},
      {VariantName::kSequential, "sequential", std::nullopt, MergeMode::kNone, std::nullopt},
  };
  return kVariants;
}

const SegmentationVariant &GetVariant(VariantName name) {
  for (const auto &v : AllVariants()) {
    if (v.name == name) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant");
}

const SegmentationVariant &ParseVariant(std::string_view label) {
  for (const auto &v : AllVariants()) {
    if (v.label == label) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown variant '" + std::string(label) + "'");
}

std::string KeywordKey(std::string_view text) {
  std::string key(Trim(text));
  for (char &c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return key;
}

std::vector<TranscriptSegment> KeywordFilter(const std::vector<TranscriptSegment> &segments,
                                             const std::set<std::string> &keywords) {
  std::set<std::string> keys;
  for (const auto &k : keywords) keys.insert(KeywordKey(k));
  std::vector<TranscriptSegment> out;
  out.reserve(segments.size());
  for (const auto &s : segments) {
    if (!keys.contains(KeywordKey(s.text))) out.push_back(s);
  }
  return out;
}

bool EndsWithSentencePunctuation(std::string_view text) {
  text = Trim(text);
  if (text.empty()) return false;
  const char last = text.back();
  return last == '.' || last == '!' || last == '?';
}

void CheckOrdered(const std::vector<TranscriptSegment> &segments) {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto &s = segments[i];
    if (!(s.start_s >= 0.0) || !(s.start_s < s.end_s)) {
      throw Error(ErrorCode::kUnsortedInput,
                  "segment " + std::to_string(i) + " of " + s.media_id + " has start >= end");
    }
    if (i == 0) continue;
    const auto &p = segments[i - 1];
    if (p.media_id != s.media_id) {
      throw Error(ErrorCode::kUnsortedInput, "mixed media ids " + p.media_id + " and " + s.media_id);
    }
    if (s.start_s < p.start_s || s.start_s < p.end_s) {
      throw Error(ErrorCode::kUnsortedInput,
                  "segment " + std::to_string(i) + " of " + s.media_id +
                      " is out of order or overlaps its predecessor");
    }
  }
}

std::vector<TranscriptSegment> MergeUntilPunctuation(
    const std::vector<TranscriptSegment> &segments, double max_len_s) {
  CheckOrdered(segments);
  std::vector<TranscriptSegment> out;
  Group group;
  for (const auto &s : segments) {
    if (!group.empty() && s.end_s - group.start() > max_len_s) group.FlushTo(out);
    group.Add(s);
    if (EndsWithSentencePunctuation(group.text())) group.FlushTo(out);
  }
  group.FlushTo(out);
  return out;
}

std::vector<TranscriptSegment> MergeOnSpeaker(const std::vector<TranscriptSegment> &segments,
                                              double max_len_s) {
  CheckOrdered(segments);
  for (const auto &s : segments) {
    if (!s.speaker) {
      throw Error(ErrorCode::kMissingSpeaker,
                  s.media_id + " segment at " + std::to_string(s.start_s) + " s has no speaker");
    }
  }
  std::vector<TranscriptSegment> out;
  Group group;
  std::optional<std::string> current;
  for (const auto &s : segments) {
    if (!group.empty() && (s.speaker != current || s.end_s - group.start() > max_len_s)) {
      group.FlushTo(out);
    }
    group.Add(s);
    current = s.speaker;
  }
  group.FlushTo(out);
  return out;
}

std::vector<TranscriptSegment> MinLengthFilter(const std::vector<TranscriptSegment> &segments,
                                               double min_s) {
  if (!(min_s > 0.0)) throw Error(ErrorCode::kInvalidArgument, "min length must be positive");
  std::vector<TranscriptSegment> out;
  out.reserve(segments.size());
  for (const auto &s : segments) {
    if (s.duration_s() >= min_s) out.push_back(s);
  }
  return out;
}

std::vector<Utterance> RunVariant(const SegmentationVariant &variant,
                                  const std::vector<TranscriptSegment> &segments,
                                  const std::set<std::string> &keywords,
                                  std::string_view media_id,
                                  std::optional<double> media_duration_s) {
  auto make_id = [](std::string_view media, std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "-%05zu", index);
    return std::string(media) + buf;
  };

  std::vector<Utterance> out;
  if (!variant.required_stage) {
    if (!media_duration_s || !(*media_duration_s > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "sequential windows need the media duration");
    }
    std::string id(media_id);
    if (id.empty() && !segments.empty()) id = segments.front().media_id;
    const double total = *media_duration_s;
    for (std::size_t k = 0;; ++k) {
      const double start = static_cast<double>(k) * kMaxUtteranceS;
      if (start >= total) break;
      const double end = std::min(start + kMaxUtteranceS, total);
      out.push_back(Utterance{make_id(id, k), id, start, end, "", std::nullopt});
    }
    return out;
  }

  for (const auto &s : segments) {
    if (s.stage != *variant.required_stage) {
      throw Error(ErrorCode::kStageMismatch,
                  std::string(variant.label) + " needs " +
                      std::string(StageName(*variant.required_stage)) + " segments, got " +
                      std::string(StageName(s.stage)));
    }
  }
  CheckOrdered(segments);

  std::vector<TranscriptSegment> work;
  switch (variant.merge_mode) {
    case MergeMode::kNone:
      work = segments;
      break;
    case MergeMode::kPunctuation:
      work = MergeUntilPunctuation(KeywordFilter(segments, keywords));
      break;
    case MergeMode::kSpeaker:
      work = MergeOnSpeaker(KeywordFilter(segments, keywords));
      break;
  }
  if (variant.min_len_s) work = MinLengthFilter(work, *variant.min_len_s);

  for (auto &s : work) {
    // Drop spans over the cap.
    if (s.duration_s() > kMaxUtteranceS) continue;
    const std::size_t index = out.size();
    out.push_back(Utterance{make_id(s.media_id, index), s.media_id, s.start_s, s.end_s,
                            std::move(s.text), std::move(s.speaker)});
  }
  return out;
}

std::vector<AudioClip> ExtractUtteranceAudio(const AudioClip &media,
                                             const std::vector<Utterance> &utterances) {
  std::vector<AudioClip> clips;
  clips.reserve(utterances.size());
  for (const auto &u : utterances) clips.push_back(Crop(media, u.start_s, u.end_s));
  return clips;
}

}  // namespace bcast::seg
