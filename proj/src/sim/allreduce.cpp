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

#include "treesum/sim/allreduce.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "treesum/error.hpp"
#include "treesum/sim/exact_sum.hpp"

namespace treesum::sim {

namespace {

void check_inputs(const std::vector<GradientBuffer>& per_rank, const CommPlan& plan) {
  if (per_rank.size() != plan.workers) {
    throw ShapeError("allreduce: " + std::to_string(per_rank.size()) + " buffers for a plan of " +
                     std::to_string(plan.workers) + " workers");
  }
  for (std::size_t r = 1; r < per_rank.size(); ++r) {
    if (per_rank[r].size() != per_rank[0].size()) {
      throw ShapeError("allreduce: rank " + std::to_string(r) + " has " + std::to_string(per_rank[r].size()) +
                       " values, rank 0 has " + std::to_string(per_rank[0].size()));
    }
  }
}

}  // namespace

GradientBuffer allreduce_sum(const std::vector<GradientBuffer>& per_rank, const CommPlan& plan) {
  check_inputs(per_rank, plan);
  if (plan.workers == 1) return per_rank[0];
  const std::size_t n = per_rank[0].size();
  GradientBuffer out;
  out.values.resize(n);
  // Only ranks that receive hold an accumulator; a rank that has not
  // received yet forwards its own value. Which case applies depends on the
  // plan alone, so it is resolved once for all elements. Elements are then
  // reduced in blocks, step by step.
  constexpr std::size_t kBlock = 16;
  struct Step {
    std::size_t acc;
    const double* own;  // receiver's value, on its first receive
    std::size_t from;   // sender's accumulator, if it has one
    const double* value;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> slot(plan.workers, kNone);
  std::vector<Step> steps;
  std::size_t slots = 0;
  for (const auto& level : plan.reduce) {
    for (const auto& e : level) {
      Step st{0, nullptr, kNone, nullptr};
      if (slot[e.receiver] == kNone) {
        slot[e.receiver] = slots++;
        st.own = per_rank[e.receiver].values.data();
      }
      st.acc = slot[e.receiver];
      if (slot[e.sender] != kNone) {
        st.from = slot[e.sender];
      } else {
        st.value = per_rank[e.sender].values.data();
      }
      steps.push_back(st);
    }
  }
  std::vector<ExactSum> acc(slots * kBlock);
  const std::size_t root = slot[plan.root];
  for (std::size_t first = 0; first < n; first += kBlock) {
    const std::size_t count = std::min(kBlock, n - first);
    for (const Step& st : steps) {
      ExactSum* a = &acc[st.acc * kBlock];
      if (st.own) {
        for (std::size_t j = 0; j < count; ++j) {
          a[j].clear();
          a[j].add(st.own[first + j]);
        }
      }
      if (st.from != kNone) {
        const ExactSum* b = &acc[st.from * kBlock];
        for (std::size_t j = 0; j < count; ++j) a[j].add(b[j]);
      } else {
        for (std::size_t j = 0; j < count; ++j) a[j].add(st.value[first + j]);
      }
    }
    for (std::size_t j = 0; j < count; ++j) out.values[first + j] = acc[root * kBlock + j].to_double();
  }
  return out;
}

void allreduce_in_place(std::vector<GradientBuffer>& per_rank, const CommPlan& plan) {
  GradientBuffer sum = allreduce_sum(per_rank, plan);
  if (plan.workers == 1) return;
  std::vector<bool> holds(plan.workers, false);
  per_rank[plan.root] = std::move(sum);
  holds[plan.root] = true;
  for (const auto& level : plan.broadcast) {
    for (const auto& e : level) {
      if (!holds[e.sender]) throw InvariantError("broadcast from rank without the sum");
      per_rank[e.receiver] = per_rank[e.sender];
      holds[e.receiver] = true;
    }
  }
}

}  // namespace treesum::sim
