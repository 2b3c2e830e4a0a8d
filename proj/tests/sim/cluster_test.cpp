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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support/random_tensor.hpp"
#include "treesum/error.hpp"

namespace treesum::sim {
namespace {

using comm::Topology;

nn::Network toy_net() {
  nn::Network net({2, 6, 6}, {nn::convolution(2, 4, 3, 1, 1), nn::relu(), nn::max_pool(2, 2),
                              nn::convolution(4, 3, 3), nn::softmax_xent()});
  net.initialize(nn::InitScheme::xavier(0.01), 42);
  return net;
}

struct Batch {
  nn::Tensor x;
  std::vector<std::size_t> y;
};

Batch random_batch(std::mt19937_64& gen, std::size_t n) {
  Batch b{testing::random_tensor({n, 2, 6, 6}, gen, 1.0), std::vector<std::size_t>(n)};
  for (auto& l : b.y) l = gen() % 3;
  return b;
}

nn::Hyperparams hyper(double lr) {
  nn::Hyperparams h;
  h.lr_schedule.base_lr = lr;
  h.momentum = 0.9;
  h.weight_decay = 5e-4;
  return h;
}

double max_rel(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(a[i]));
  }
  return num / den;
}

TEST(SplitBatchTest, ContiguousByRank) {
  std::mt19937_64 gen(1);
  const Batch b = random_batch(gen, 8);
  const auto shards = split_batch(b.x, b.y, 4);
  ASSERT_EQ(shards.size(), 4u);
  for (std::size_t r = 0; r < 4; ++r) {
    EXPECT_EQ(shards[r].inputs.dim(0), 2u);
    EXPECT_EQ(shards[r].labels[1], b.y[2 * r + 1]);
    EXPECT_EQ(shards[r].inputs.at(1, 1, 5, 5), b.x.at(2 * r + 1, 1, 5, 5));
  }
  EXPECT_THROW(split_batch(b.x, b.y, 3), ConfigError);
}

TEST(DistributedIterationTest, SingleWorkerEqualsPlainStep) {
  std::mt19937_64 gen(2);
  const Batch b = random_batch(gen, 16);
  nn::Network plain = toy_net();
  const nn::Gradients g = plain.forward_backward(b.x, b.y);
  plain.apply_update(g.flatten(), {0.05, 0.9, 5e-4});

  auto workers = make_workers(toy_net(), 1);
  const auto res = run_distributed_iteration(workers, split_batch(b.x, b.y, 1), plan_topology(Topology::single(), 1),
                                             comm::HardwareModel{}, hyper(0.05), 0);
  EXPECT_TRUE(nn::bitwise_equal_state(workers[0].replica, plain));
  EXPECT_EQ(res.loss, g.loss);
  EXPECT_EQ(res.clock.comm_seconds, 0.0);
}

TEST(DistributedIterationTest, FourWorkersMatchOneStep) {
  std::mt19937_64 gen(3);
  const Batch b = random_batch(gen, 16);
  nn::Network oracle = toy_net();
  oracle.apply_update(oracle.forward_backward(b.x, b.y).flatten(), {0.05, 0.9, 5e-4});
  for (const Topology& t : {Topology::parameter_server(), Topology::tree(2), Topology::tree(3)}) {
    auto workers = make_workers(toy_net(), 4);
    run_distributed_iteration(workers, split_batch(b.x, b.y, 4), plan_topology(t, 4), comm::HardwareModel{},
                              hyper(0.05), 0);
    EXPECT_LT(max_rel(oracle.flat_weights(), workers[3].replica.flat_weights()), 1e-12) << to_string(t);
  }
}

TEST(DistributedIterationTest, TwoWorkersFollowMomentumTrajectory) {
  std::mt19937_64 gen(4);
  nn::Network oracle = toy_net();
  auto workers = make_workers(toy_net(), 2);
  const CommPlan plan = plan_topology(Topology::tree(2), 2);
  for (std::size_t it = 0; it < 3; ++it) {
    const Batch b = random_batch(gen, 16);
    const double want = oracle.forward_backward(b.x, b.y).loss;
    oracle.apply_update(oracle.forward_backward(b.x, b.y).flatten(), {0.05, 0.9, 5e-4});
    const auto res = run_distributed_iteration(workers, split_batch(b.x, b.y, 2), plan, comm::HardwareModel{},
                                               hyper(0.05), it);
    EXPECT_NEAR(res.loss, want, 1e-12 * want);
    EXPECT_LT(max_rel(oracle.flat_weights(), workers[0].replica.flat_weights()), 1e-12) << it;
    double vel = 0.0;
    for (std::size_t i = 0; i < oracle.parameters().size(); ++i) {
      vel = std::max(vel, nn::max_relative_difference(oracle.parameters()[i].weight_velocity,
                                                      workers[1].replica.parameters()[i].weight_velocity));
    }
    EXPECT_LT(vel, 1e-12);
  }
}

TEST(DistributedIterationTest, ReplicasStayIdenticalAndClocksAdvance) {
  std::mt19937_64 gen(5);
  auto workers = make_workers(toy_net(), 8);
  const CommPlan plan = plan_topology(Topology::tree(2), 8);
  comm::HardwareModel hw;
  hw.latency = 1e-6;
  double last = 0.0;
  for (std::size_t it = 0; it < 5; ++it) {
    const Batch b = random_batch(gen, 16);
    const auto res = run_distributed_iteration(workers, split_batch(b.x, b.y, 8), plan, hw, hyper(0.05), it);
    EXPECT_GT(res.clock.comm_seconds, 0.0);
    EXPECT_EQ(res.clock.compute_seconds.size(), 8u);
    for (const auto& w : workers) EXPECT_EQ(w.clock, workers[0].clock);
    EXPECT_GT(workers[0].clock, last);
    last = workers[0].clock;
  }
}

TEST(DistributedIterationTest, DetectsReplicaDivergence) {
  std::mt19937_64 gen(6);
  const Batch b = random_batch(gen, 4);
  auto workers = make_workers(toy_net(), 2);
  double& w = workers[1].replica.parameters()[0].weights[0];
  w = std::nextafter(w, 1.0);
  try {
    run_distributed_iteration(workers, split_batch(b.x, b.y, 2), plan_topology(Topology::tree(), 2),
                              comm::HardwareModel{}, hyper(0.05), 0);
    FAIL();
  } catch (const InvariantError& e) {
    EXPECT_NE(std::string(e.what()).find("rank 1"), std::string::npos);
  }
}

TEST(DistributedIterationTest, DeterministicReports) {
  auto run = [] {
    std::mt19937_64 gen(7);
    auto workers = make_workers(toy_net(), 4);
    std::vector<SimClockReport> reports;
    for (std::size_t it = 0; it < 3; ++it) {
      const Batch b = random_batch(gen, 8);
      reports.push_back(run_distributed_iteration(workers, split_batch(b.x, b.y, 4),
                                                  plan_topology(Topology::parameter_server(), 4),
                                                  comm::HardwareModel{}, hyper(0.05), it)
                            .clock);
    }
    return std::make_pair(reports, workers[0].replica.weight_bytes());
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace treesum::sim
