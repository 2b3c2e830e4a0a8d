// Copyright 2026 The Treesum Authors.
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

#pragma once

#include <cstddef>
#include <vector>

#include "treesum/sim/plan.hpp"

namespace treesum::sim {

inline constexpr std::size_t kWireBytesPerValue = 4;

/// One worker's weight gradients, flattened in parameter order. Arithmetic
/// is f64; byte_size() reports the f32 wire format used by the timing model.
struct GradientBuffer {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::size_t byte_size() const { return kWireBytesPerValue * values.size(); }
  friend bool operator==(const GradientBuffer&, const GradientBuffer&) = default;
};

/// Element-wise sum of one buffer per rank, executed along the plan. Partial
/// sums travel as exact accumulators and the root rounds once, so the result
/// is the correctly rounded exact sum for every topology.
GradientBuffer allreduce_sum(const std::vector<GradientBuffer>& per_rank, const CommPlan& plan);

/// Runs the plan including the broadcast phase: on return every buffer holds
/// the sum, delivered along the broadcast events.
void allreduce_in_place(std::vector<GradientBuffer>& per_rank, const CommPlan& plan);

}  // namespace treesum::sim
