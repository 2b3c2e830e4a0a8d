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

#include "treesum/sim/cluster.hpp"

#include <string>

#include "treesum/error.hpp"
#include "treesum/sim/exact_sum.hpp"

namespace treesum::sim {

std::vector<WorkerState> make_workers(const nn::Network& net, std::size_t p) {
  if (p == 0) throw ConfigError("worker count must be >= 1");
  std::vector<WorkerState> w;
  w.reserve(p);
  for (std::size_t r = 0; r < p; ++r) w.push_back({r, net, {}, 0.0});
  return w;
}

std::vector<Shard> split_batch(const nn::Tensor& inputs, std::span<const std::size_t> labels, std::size_t p) {
  const std::size_t n = inputs.dim(0);
  if (p == 0 || n % p != 0) {
    throw ConfigError("batch " + std::to_string(n) + " is not divisible by " + std::to_string(p) + " workers");
  }
  if (labels.size() != n) throw ShapeError("split_batch: label count does not match inputs");
  const std::size_t per = n / p;
  const std::size_t stride = n == 0 ? 0 : inputs.size() / n;
  nn::Shape shape = inputs.shape();
  shape[0] = per;
  std::vector<Shard> out;
  out.reserve(p);
  for (std::size_t r = 0; r < p; ++r) {
    const auto first = inputs.values().begin() + static_cast<std::ptrdiff_t>(r * per * stride);
    std::vector<double> vals(first, first + static_cast<std::ptrdiff_t>(per * stride));
    out.push_back({nn::Tensor(shape, std::move(vals)),
                   std::vector<std::size_t>(labels.begin() + static_cast<std::ptrdiff_t>(r * per),
                                            labels.begin() + static_cast<std::ptrdiff_t>((r + 1) * per))});
  }
  return out;
}

namespace {

void check_replicas(const std::vector<WorkerState>& workers, const char* when) {
  for (std::size_t r = 1; r < workers.size(); ++r) {
    if (!nn::bitwise_equal_state(workers[0].replica, workers[r].replica)) {
      throw InvariantError(std::string("replica divergence ") + when + ": rank " + std::to_string(r) +
                           " differs from rank 0");
    }
  }
}

}  // namespace

IterationResult run_distributed_iteration(std::vector<WorkerState>& workers, const std::vector<Shard>& shards,
                                          const CommPlan& plan, const comm::HardwareModel& hw,
                                          const nn::Hyperparams& hyper, std::size_t iter) {
  const std::size_t p = workers.size();
  if (p != plan.workers || shards.size() != p) {
    throw ShapeError("distributed iteration: " + std::to_string(p) + " workers, " + std::to_string(shards.size()) +
                     " shards, plan for " + std::to_string(plan.workers));
  }
  check_replicas(workers, "before aggregation");
  std::size_t global = 0;
  for (const auto& s : shards) global += s.labels.size();
  if (global == 0) throw ShapeError("distributed iteration: empty batch");

  IterationResult res;
  res.clock.compute_seconds.resize(p);
  ExactSum loss;
  std::vector<GradientBuffer> grads(p);
  const double macs = static_cast<double>(workers[0].replica.forward_macs_per_sample());
  for (std::size_t r = 0; r < p; ++r) {
    nn::Gradients g = workers[r].replica.forward_backward(shards[r].inputs, shards[r].labels,
                                                          static_cast<double>(global));
    loss.add(g.loss);
    grads[r].values = g.flatten();
    res.clock.compute_seconds[r] = 6.0 * macs * static_cast<double>(shards[r].labels.size()) / hw.worker_flops;
  }
  res.loss = loss.to_double();

  const double payload = static_cast<double>(grads[0].byte_size());
  allreduce_in_place(grads, plan);
  const SimClockReport comm_clock = simulate_comm_time(plan, payload, hw);
  res.clock.reduce_seconds = comm_clock.reduce_seconds;
  res.clock.broadcast_seconds = comm_clock.broadcast_seconds;
  res.clock.comm_seconds = comm_clock.comm_seconds;

  const nn::SgdStep step{nn::lr_at(hyper.lr_schedule, iter), hyper.momentum, hyper.weight_decay};
  const double elapsed = res.clock.total_seconds();
  for (std::size_t r = 0; r < p; ++r) {
    workers[r].replica.apply_update(grads[r].values, step);
    workers[r].gradient = std::move(grads[r]);
    workers[r].clock += elapsed;
  }
  check_replicas(workers, "after update");
  return res;
}

}  // namespace treesum::sim
