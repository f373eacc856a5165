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

#include "bcast/batcher.h"

#include <cmath>
#include <set>

#include "bcast/error.h"
#include "bcast/rng.h"

namespace bcast::batch {

std::int64_t TokensForDuration(double duration_s, int sample_rate) {
  return std::llround(duration_s * sample_rate);
}

BatchPlan Assemble(const std::vector<Item> &items, std::int64_t token_budget, std::uint64_t seed) {
  if (token_budget <= 0) throw Error(ErrorCode::kInvalidArgument, "token budget must be positive");
  std::set<std::string> seen;
  for (const auto &item : items) {
    if (item.tokens <= 0) {
      throw Error(ErrorCode::kInvalidArgument, "utterance " + item.id + " has no tokens");
    }
    if (item.tokens > token_budget) {
      throw Error(ErrorCode::kOversizeUtterance,
                  "utterance " + item.id + " has " + std::to_string(item.tokens) +
                      " tokens, budget is " + std::to_string(token_budget));
    }
    if (!seen.insert(item.id).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate utterance id " + item.id);
    }
  }

  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  rng.Shuffle(order);

  BatchPlan plan;
  plan.token_budget = token_budget;
  plan.seed = seed;
  Batch current;
  for (std::size_t index : order) {
    const Item &item = items[index];
    if (!current.utterance_ids.empty() && current.tokens + item.tokens > token_budget) {
      plan.batches.push_back(std::move(current));
      current = Batch{};
    }
    current.utterance_ids.push_back(item.id);
    current.tokens += item.tokens;
  }
  if (!current.utterance_ids.empty()) {
    current.partial = current.tokens < token_budget;
    plan.batches.push_back(std::move(current));
  }
  return plan;
}

FillReport PlanStats(const BatchPlan &plan) {
  FillReport report;
  if (plan.batches.empty() || plan.token_budget <= 0) return report;
  double sum = 0.0;
  for (const auto &b : plan.batches) {
    const double f = static_cast<double>(b.tokens) / static_cast<double>(plan.token_budget);
    report.fill.push_back(f);
    sum += f;
  }
  report.mean_fill = sum / static_cast<double>(plan.batches.size());
  return report;
}

}  // namespace bcast::batch
