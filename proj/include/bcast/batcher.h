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

#ifndef BCAST_BATCHER_H_
#define BCAST_BATCHER_H_

#include <cstdint>
#include <string>
#include <vector>

namespace bcast::batch {

struct Item {
  std::string id;
  std::int64_t tokens = 0;
};

struct Batch {
  std::vector<std::string> utterance_ids;
  std::int64_t tokens = 0;
  // Set on the last batch when it is below budget.
  bool partial = false;
};

struct BatchPlan {
  std::vector<Batch> batches;
  std::int64_t token_budget = 0;
  std::uint64_t seed = 0;
};

/// Token count of an utterance (one token per sample).
std::int64_t TokensForDuration(double duration_s, int sample_rate);

/// Shuffles `items` with a seeded generator, then packs greedily: a batch
/// closes as soon as the next item would push it past the budget.
BatchPlan Assemble(const std::vector<Item> &items, std::int64_t token_budget, std::uint64_t seed);

struct FillReport {
  std::vector<double> fill;  // tokens used / budget, per batch
  double mean_fill = 0.0;
};

FillReport PlanStats(const BatchPlan &plan);

}  // namespace bcast::batch

#endif  // BCAST_BATCHER_H_
