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
#include <span>
#include <vector>

#include "treesum/comm/model.hpp"
#include "treesum/nn/lr_schedule.hpp"
#include "treesum/nn/network.hpp"
#include "treesum/sim/allreduce.hpp"
#include "treesum/sim/plan.hpp"
#include "treesum/sim/timing.hpp"

namespace treesum::sim {

struct WorkerState {
  std::size_t rank = 0;
  nn::Network replica;
  GradientBuffer gradient;
  double clock = 0.0;  // virtual seconds
};

/// p replicas of `net`, ranks 0..p-1.
std::vector<WorkerState> make_workers(const nn::Network& net, std::size_t p);

struct Shard {
  nn::Tensor inputs;  // (n, c, h, w)
  std::vector<std::size_t> labels;
};

/// Splits a global batch into p contiguous shards by ascending rank. The
/// batch size must be divisible by p.
std::vector<Shard> split_batch(const nn::Tensor& inputs, std::span<const std::size_t> labels, std::size_t p);

struct IterationResult {
  double loss = 0.0;  // mean over the global batch
  SimClockReport clock;
};

/// One synchronous step: every rank computes gradients on its shard
/// (normalized by the global batch), the gradients are summed along the
/// plan, and every rank applies the same momentum SGD step at
/// lr_at(schedule, iter). Throws InvariantError if the replicas differ
/// before aggregation or after the update.
IterationResult run_distributed_iteration(std::vector<WorkerState>& workers, const std::vector<Shard>& shards,
                                          const CommPlan& plan, const comm::HardwareModel& hw,
                                          const nn::Hyperparams& hyper, std::size_t iter);

}  // namespace treesum::sim
