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

#include "bcast/scheduler.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bcast/error.h"

namespace bcast::sched {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::int64_t WarmupSteps(const TwoStage &s) {
  return std::llround(s.warmup_fraction * static_cast<double>(s.total_steps));
}

// Exact at both ends: t = 0 gives a, t = 1 gives b.
double Lerp(double a, double b, double t) { return a * (1.0 - t) + b * t; }

std::string FormatG(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view KindName(const Schedule &schedule) {
  return std::visit(Overloaded{[](const Triangular &) { return "triangular"; },
                               [](const TwoStage &) { return "two-stage"; },
                               [](const TriStage &) { return "tri-stage"; }},
                    schedule);
}

std::int64_t TotalSteps(const Schedule &schedule) {
  return std::visit(
      Overloaded{[](const Triangular &s) { return s.steps_up + s.steps_down; },
                 [](const TwoStage &s) { return s.total_steps; },
                 [](const TriStage &s) { return s.total_steps; }},
      schedule);
}

double PeakLr(const Schedule &schedule) {
  return std::visit(Overloaded{[](const Triangular &s) { return s.peak_lr; },
                               [](const TwoStage &s) { return s.peak_lr; },
                               [](const TriStage &s) {
                                 return std::max({s.init_lr, s.hold_lr, s.final_lr});
                               }},
                    schedule);
}

std::array<std::int64_t, 3> PhaseEnds(const Schedule &schedule) {
  return std::visit(
      Overloaded{
          [](const Triangular &s) {
            return std::array<std::int64_t, 3>{s.steps_up, s.steps_up + s.steps_down,
                                               s.steps_up + s.steps_down};
          },
          [](const TwoStage &s) {
            return std::array<std::int64_t, 3>{WarmupSteps(s), s.total_steps, s.total_steps};
          },
          [](const TriStage &s) {
            const auto total = static_cast<double>(s.total_steps);
            const std::int64_t warm = std::llround(s.phase_fractions[0] * total);
            const std::int64_t hold = std::llround(s.phase_fractions[1] * total);
            return std::array<std::int64_t, 3>{warm, warm + hold, s.total_steps};
          }},
      schedule);
}

void Validate(const Schedule &schedule) {
  auto fail = [](const std::string &what) { throw Error(ErrorCode::kInvalidConfig, what); };
  std::visit(
      Overloaded{
          [&](const Triangular &s) {
            if (!(s.peak_lr > 0.0)) fail("triangular: peak_lr must be positive");
            if (s.steps_up <= 0 || s.steps_down <= 0) fail("triangular: phases must be non-empty");
            if (!(s.min_ratio > 0.0 && s.min_ratio <= 1.0)) fail("triangular: min_ratio must be in (0, 1]");
          },
          [&](const TwoStage &s) {
            if (!(s.peak_lr > 0.0)) fail("two-stage: peak_lr must be positive");
            if (!(s.init_ratio > 0.0) || !(s.final_ratio > 0.0)) fail("two-stage: ratios must be positive");
            if (!(s.warmup_fraction > 0.0 && s.warmup_fraction < 1.0))
              fail("two-stage: warmup_fraction must be in (0, 1)");
            const std::int64_t w = WarmupSteps(s);
            if (w <= 0 || w >= s.total_steps) fail("two-stage: warm-up and decay must be non-empty");
          },
          [&](const TriStage &s) {
            if (!(s.init_lr > 0.0 && s.hold_lr > 0.0 && s.final_lr > 0.0))
              fail("tri-stage: learning rates must be positive");
            double sum = 0.0;
            for (double f : s.phase_fractions) {
              if (!(f > 0.0)) fail("tri-stage: phase fractions must be positive");
              sum += f;
            }
            if (std::abs(sum - 1.0) > 1e-9) fail("tri-stage: phase fractions must sum to 1");
            if (s.total_steps <= 0) fail("tri-stage: total_steps must be positive");
            const auto ends = PhaseEnds(s);
            if (ends[0] <= 0 || ends[1] <= ends[0] || ends[2] <= ends[1])
              fail("tri-stage: every phase must span at least one step");
          }},
      schedule);
}

double LrAt(const Schedule &schedule, std::int64_t step) {
  Validate(schedule);
  const std::int64_t total = TotalSteps(schedule);
  if (step < 0 || step > total) {
    throw Error(ErrorCode::kOutOfRange,
                "step " + std::to_string(step) + " outside [0, " + std::to_string(total) + "]");
  }
  return std::visit(
      Overloaded{
          [step](const Triangular &s) {
            const double lo = s.peak_lr * s.min_ratio;
            if (step <= s.steps_up) {
              return Lerp(lo, s.peak_lr, static_cast<double>(step) / s.steps_up);
            }
            return Lerp(s.peak_lr, lo, static_cast<double>(step - s.steps_up) / s.steps_down);
          },
          [step](const TwoStage &s) {
            const std::int64_t warm = WarmupSteps(s);
            if (step <= warm) {
              return Lerp(s.peak_lr * s.init_ratio, s.peak_lr, static_cast<double>(step) / warm);
            }
            const double progress =
                static_cast<double>(step - warm) / static_cast<double>(s.total_steps - warm);
            const double lo = s.peak_lr * s.final_ratio;
            return lo + (s.peak_lr - lo) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
          },
          [step](const TriStage &s) {
            const auto ends = PhaseEnds(s);
            if (step <= ends[0]) {
              return Lerp(s.init_lr, s.hold_lr, static_cast<double>(step) / ends[0]);
            }
            if (step <= ends[1]) return s.hold_lr;
            if (step == ends[2]) return s.final_lr;
            const double t =
                static_cast<double>(step - ends[1]) / static_cast<double>(ends[2] - ends[1]);
            return s.hold_lr * std::exp(std::log(s.final_lr / s.hold_lr) * t);
          }},
      schedule);
}

void WriteTable(std::ostream &os, const Schedule &schedule, std::int64_t stride) {
  Validate(schedule);
  if (stride <= 0) throw Error(ErrorCode::kInvalidArgument, "stride must be positive");
  const std::int64_t total = TotalSteps(schedule);
  os << "# kind=" << KindName(schedule) << '\n';
  std::visit(
      Overloaded{
          [&](const Triangular &s) {
            os << "# peak_lr=" << FormatG(s.peak_lr) << "\n# steps_up=" << s.steps_up
               << "\n# steps_down=" << s.steps_down << "\n# min_ratio=" << FormatG(s.min_ratio)
               << '\n';
          },
          [&](const TwoStage &s) {
            os << "# peak_lr=" << FormatG(s.peak_lr) << "\n# total_steps=" << s.total_steps
               << "\n# warmup_fraction=" << FormatG(s.warmup_fraction)
               << "\n# init_ratio=" << FormatG(s.init_ratio)
               << "\n# final_ratio=" << FormatG(s.final_ratio) << '\n';
          },
          [&](const TriStage &s) {
            os << "# init_lr=" << FormatG(s.init_lr) << "\n# hold_lr=" << FormatG(s.hold_lr)
               << "\n# final_lr=" << FormatG(s.final_lr) << "\n# total_steps=" << s.total_steps
               << "\n# phase_fractions=" << FormatG(s.phase_fractions[0]) << ','
               << FormatG(s.phase_fractions[1]) << ',' << FormatG(s.phase_fractions[2]) << '\n';
          }},
      schedule);
  os << "# stride=" << stride << '\n';
  os << "step\tlr\n";
  for (std::int64_t step = 0; step <= total; step += stride) {
    os << step << '\t' << FormatG(LrAt(schedule, step)) << '\n';
    if (step != total && step + stride > total) {
      os << total << '\t' << FormatG(LrAt(schedule, total)) << '\n';
    }
  }
}

double SqrtScale(double reference_lr, double reference_tokens, double new_tokens) {
  if (!(reference_tokens > 0.0) || !(new_tokens > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "token counts must be positive");
  }
  return reference_lr * std::sqrt(new_tokens / reference_tokens);
}

std::int64_t TokensOf(double duration_minutes, int sample_rate) {
  if (!(duration_minutes > 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "duration and sample rate must be positive");
  }
  return std::llround(duration_minutes * 60.0 * sample_rate);
}

double SecondsOf(double tokens, int sample_rate) {
  if (!(tokens > 0.0) || sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "tokens and sample rate must be positive");
  }
  return tokens / sample_rate;
}

}  // namespace bcast::sched
