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

#include <cstdint>
#include <string_view>
#include <vector>

#include "treesum/comm/model.hpp"

namespace treesum::sim {

enum class Payload { kGradient, kSum, kBroadcast };
std::string_view to_string(Payload p);

struct CommEvent {
  std::uint64_t sender = 0;
  std::uint64_t receiver = 0;
  Payload payload = Payload::kGradient;
  friend bool operator==(const CommEvent&, const CommEvent&) = default;
};

using CommLevel = std::vector<CommEvent>;

/// Reduce levels run first (towards the root), then broadcast levels (from
/// the root). Within a level, events are ordered by receiver, then sender.
struct CommPlan {
  comm::Topology topology;
  std::uint64_t workers = 1;
  std::uint64_t root = 0;
  std::vector<CommLevel> reduce;
  std::vector<CommLevel> broadcast;

  bool empty() const { return reduce.empty() && broadcast.empty(); }
  std::size_t level_count() const { return reduce.size() + broadcast.size(); }
};

/// Parameter server: one level of p-1 sends to rank 0, one broadcast level.
/// k-ary tree: ceil(log_k p) levels; at level l (stride s = k^(l-1)) every
/// multiple r of s*k receives from r + j*s, j = 1..k-1, in ascending order.
CommPlan plan_topology(const comm::Topology& topo, std::uint64_t p);

/// Throws InvariantError unless the reduce phase is a tree rooted at
/// plan.root in which every other rank sends exactly once after all of its
/// own receives, and the broadcast phase delivers the result to every other
/// rank exactly once from a rank that already holds it.
void validate_plan(const CommPlan& plan);

}  // namespace treesum::sim
