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

#ifndef BCAST_SCHEDULER_H_
#define BCAST_SCHEDULER_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

namespace bcast::sched {

// Linear ramp min -> peak over steps_up, then back to min over steps_down,
// with min = peak * min_ratio.
struct Triangular {
  double peak_lr = 1e-4;
  std::int64_t steps_up = 25000;
  std::int64_t steps_down = 25000;
  double min_ratio = 1.0 / 100.0;
};

// Linear warm-up from peak * init_ratio to peak over the first
// warmup_fraction of steps, then cosine annealing to peak * final_ratio.
struct TwoStage {
  double peak_lr = 1e-3;
  std::int64_t total_steps = 500000;
  double warmup_fraction = 0.10;
  double init_ratio = 1.0 / 1000.0;
  double final_ratio = 1.0 / 100.0;
};

// Linear warm-up init -> hold, constant hold, exponential decay hold -> final.
struct TriStage {
  double init_lr = 5e-7;
  double hold_lr = 5e-5;
  double final_lr = 2.5e-6;
  std::int64_t total_steps = 80000;
  std::array<double, 3> phase_fractions = {0.10, 0.40, 0.50};
};

using Schedule = std::variant<Triangular, TwoStage, TriStage>;

std::string_view KindName(const Schedule &schedule);
std::int64_t TotalSteps(const Schedule &schedule);
double PeakLr(const Schedule &schedule);

/// Step indices where each phase ends (cumulative). Triangular has two
/// phases, the others two or three; unused entries equal total_steps.
std::array<std::int64_t, 3> PhaseEnds(const Schedule &schedule);

/// Throws on non-positive rates, empty phases or fractions not summing to 1.
void Validate(const Schedule &schedule);

/// Learning rate at `step`, 0 <= step <= total steps.
double LrAt(const Schedule &schedule, std::int64_t step);

/// Writes a "# key=value" summary header followed by "step<TAB>lr" rows,
/// one every `stride` steps (the final step is always included).
void WriteTable(std::ostream &os, const Schedule &schedule, std::int64_t stride = 1);

/// reference_lr * sqrt(new_tokens / reference_tokens).
double SqrtScale(double reference_lr, double reference_tokens, double new_tokens);

/// One token per audio sample.
std::int64_t TokensOf(double duration_minutes, int sample_rate);
double SecondsOf(double tokens, int sample_rate);

}  // namespace bcast::sched

#endif  // BCAST_SCHEDULER_H_
