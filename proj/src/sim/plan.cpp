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

#include "treesum/sim/plan.hpp"

#include <string>

#include "treesum/error.hpp"

namespace treesum::sim {

std::string_view to_string(Payload p) {
  switch (p) {
    case Payload::kGradient: return "gradient";
    case Payload::kSum: return "sum";
    case Payload::kBroadcast: return "broadcast";
  }
  return "?";
}

namespace {

std::vector<CommLevel> mirror(const std::vector<CommLevel>& reduce) {
  std::vector<CommLevel> out;
  for (auto it = reduce.rbegin(); it != reduce.rend(); ++it) {
    CommLevel level;
    for (const auto& e : *it) level.push_back({e.receiver, e.sender, Payload::kBroadcast});
    out.push_back(std::move(level));
  }
  return out;
}

}  // namespace

CommPlan plan_topology(const comm::Topology& topo, std::uint64_t p) {
  if (p == 0) throw ConfigError("worker count must be >= 1");
  topo.validate();
  CommPlan plan;
  plan.topology = topo;
  plan.workers = p;
  if (p == 1) return plan;
  switch (topo.kind) {
    case comm::TopologyKind::kSingle:
      throw ConfigError("topology 'single' requires p = 1, got " + std::to_string(p));
    case comm::TopologyKind::kParameterServer: {
      CommLevel level;
      for (std::uint64_t r = 1; r < p; ++r) level.push_back({r, 0, Payload::kGradient});
      plan.reduce.push_back(std::move(level));
      break;
    }
    case comm::TopologyKind::kReductionTree: {
      const std::uint64_t k = topo.k;
      std::vector<bool> holds_sum(p, false);
      for (std::uint64_t s = 1; s < p; s = s > p / k ? p : s * k) {
        CommLevel level;
        std::vector<std::uint64_t> receivers;
        for (std::uint64_t r = 0; r < p; r += s * k) {
          for (std::uint64_t j = 1; j < k; ++j) {
            const std::uint64_t child = r + j * s;
            if (child >= p) break;
            level.push_back({child, r, holds_sum[child] ? Payload::kSum : Payload::kGradient});
            receivers.push_back(r);
          }
        }
        for (std::uint64_t r : receivers) holds_sum[r] = true;
        plan.reduce.push_back(std::move(level));
      }
      break;
    }
  }
  plan.broadcast = mirror(plan.reduce);
  return plan;
}

void validate_plan(const CommPlan& plan) {
  const std::uint64_t p = plan.workers;
  auto fail = [](const std::string& what) { throw InvariantError("invalid communication plan: " + what); };
  if (p == 1) {
    if (!plan.empty()) fail("single worker plan must be empty");
    return;
  }
  std::vector<int> sent(p, 0);
  for (const auto& level : plan.reduce) {
    for (const auto& e : level) {
      if (e.sender >= p || e.receiver >= p) fail("rank out of range");
      if (e.sender == e.receiver) fail("self send");
      if (e.sender == plan.root) fail("root sends during reduce");
      if (sent[e.sender]++) fail("rank " + std::to_string(e.sender) + " sends twice during reduce");
      if (sent[e.receiver]) fail("rank " + std::to_string(e.receiver) + " receives after sending");
      if (e.payload == Payload::kBroadcast) fail("broadcast payload in reduce phase");
    }
  }
  for (std::uint64_t r = 0; r < p; ++r) {
    if (r != plan.root && sent[r] != 1) fail("rank " + std::to_string(r) + " never sends during reduce");
  }
  std::vector<int> has(p, 0);
  has[plan.root] = 1;
  for (const auto& level : plan.broadcast) {
    std::vector<int> next = has;
    for (const auto& e : level) {
      if (e.sender >= p || e.receiver >= p) fail("rank out of range");
      if (!has[e.sender]) fail("rank " + std::to_string(e.sender) + " broadcasts before holding the sum");
      if (next[e.receiver]++) fail("rank " + std::to_string(e.receiver) + " receives the sum twice");
      if (e.payload != Payload::kBroadcast) fail("non-broadcast payload in broadcast phase");
    }
    has = std::move(next);
  }
  for (std::uint64_t r = 0; r < p; ++r) {
    if (!has[r]) fail("rank " + std::to_string(r) + " never receives the sum");
  }
}

}  // namespace treesum::sim
