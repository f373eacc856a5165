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

#ifndef BCAST_ERROR_H_
#define BCAST_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bcast {

enum class ErrorCode {
  kUnreadableFile,
  kUnsupportedEncoding,
  kEmptyClip,
  kSampleRateMismatch,
  kSilentInput,
  kOutOfRange,
  kUnsortedInput,
  kMissingSpeaker,
  kStageMismatch,
  kNoEligiblePartner,
  kEmptyPool,
  kEmptyReference,
  kInvalidArgument,
  kOversizeUtterance,
  kParseError,
  kInvalidConfig,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Library failure. The CLI maps `code()` to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bcast

#endif  // BCAST_ERROR_H_
