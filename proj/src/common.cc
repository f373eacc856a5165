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

#include "bcast/error.h"
#include "bcast/rng.h"

namespace bcast {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreadableFile: return "unreadable-file";
    case ErrorCode::kUnsupportedEncoding: return "unsupported-encoding";
    case ErrorCode::kEmptyClip: return "empty-clip";
    case ErrorCode::kSampleRateMismatch: return "sample-rate-mismatch";
    case ErrorCode::kSilentInput: return "silent-input";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kUnsortedInput: return "unsorted-input";
    case ErrorCode::kMissingSpeaker: return "missing-speaker";
    case ErrorCode::kStageMismatch: return "stage-mismatch";
    case ErrorCode::kNoEligiblePartner: return "no-eligible-partner";
    case ErrorCode::kEmptyPool: return "empty-pool";
    case ErrorCode::kEmptyReference: return "empty-reference";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kOversizeUtterance: return "oversize-utterance";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kInvalidConfig: return "invalid-config";
    case ErrorCode::kIoError: return "io-error";
  }
  return "unknown";
}

namespace {

// splitmix64 finalizer.
std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng Rng::Derive(std::uint64_t seed, std::uint64_t index) {
  return Rng(Mix64(Mix64(seed) ^ Mix64(index + 0x632be59bd9b4e019ULL)));
}

std::uint64_t Rng::Below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace bcast
