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

#include "treesum/nn/network.hpp"

#include <gtest/gtest.h>

#include <random>

#include "support/random_tensor.hpp"
#include "treesum/error.hpp"

namespace treesum::nn {
namespace {

Network small_net() {
  return Network({2, 6, 6}, {convolution(2, 4, 3, 1, 1), relu(), convolution(4, 4, 1), relu(), max_pool(2, 2),
                             fully_connected(4, 3, 3, 3), softmax_xent()});
}

TEST(NetworkTest, ParameterLayoutAndCount) {
  Network net = small_net();
  EXPECT_EQ(net.parameters().size(), 3u);
  EXPECT_EQ(net.parameter_count(), (4 * 2 * 9 + 4) + (4 * 4 + 4) + (3 * 4 * 9 + 3));
  EXPECT_EQ(net.num_classes(), 3u);
  EXPECT_EQ(net.flat_weights().size(), net.parameter_count());
}

TEST(NetworkTest, RejectsBadGeometry) {
  EXPECT_THROW(Network({3, 4, 4}, {convolution(2, 4, 3), softmax_xent()}), ShapeError);
  EXPECT_THROW(Network({3}, {fully_connected(3, 2, 1, 1)}), ShapeError);
  EXPECT_THROW(Network({3}, {softmax_xent(), fully_connected(3, 2, 1, 1), softmax_xent()}), ShapeError);
  Network net({3}, {fully_connected(3, 2, 1, 1), softmax_xent()});
  EXPECT_THROW(net.forward(Tensor({1, 4, 1, 1})), ShapeError);
}

TEST(NetworkTest, LayerStreamsAreIndependent) {
  // Initializing a net whose first layer differs must not change later layers.
  Network a = small_net();
  Network b({2, 6, 6}, {convolution(2, 4, 3, 1, 1), relu(), convolution(4, 4, 1), relu(), max_pool(2, 2),
                        fully_connected(4, 3, 3, 3), softmax_xent()});
  a.initialize(nin_gaussian_policy, 11);
  b.initialize(InitScheme::gaussian(0.5), 11);
  EXPECT_FALSE(bitwise_equal(a.parameters()[0].weights, b.parameters()[0].weights));
  EXPECT_FALSE(bitwise_equal(a.parameters()[1].weights, b.parameters()[1].weights));
  b.initialize(nin_gaussian_policy, 11);
  EXPECT_TRUE(bitwise_equal_state(a, b));
}

TEST(NetworkTest, ShardedGradientsSumToFullBatch) {
  std::mt19937_64 gen(4);
  Network net = small_net();
  net.initialize(nin_gaussian_policy, 3);
  const std::size_t batch = 8;
  const Tensor x = testing::random_tensor({batch, 2, 6, 6}, gen, 1.0);
  std::vector<std::size_t> labels(batch);
  for (auto& l : labels) l = gen() % 3;
  const auto full = net.forward_backward(x, labels).flatten();

  const std::size_t per = x.size() / batch;
  std::vector<double> sum(full.size(), 0.0);
  for (std::size_t s = 0; s < 4; ++s) {
    std::vector<double> vals(x.values().begin() + static_cast<std::ptrdiff_t>(2 * s * per),
                             x.values().begin() + static_cast<std::ptrdiff_t>(2 * (s + 1) * per));
    const Tensor shard({2, 2, 6, 6}, std::move(vals));
    const std::vector<std::size_t> sl(labels.begin() + 2 * s, labels.begin() + 2 * (s + 1));
    const auto g = net.forward_backward(shard, sl, static_cast<double>(batch)).flatten();
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] += g[i];
  }
  double mx = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) {
    mx = std::max(mx, std::abs(full[i]));
    diff = std::max(diff, std::abs(full[i] - sum[i]));
  }
  EXPECT_LE(diff, 1e-12 * mx);
}

TEST(NetworkTest, TrainingIsDeterministicAndReducesLoss) {
  std::mt19937_64 gen(5);
  const Tensor x = testing::random_tensor({16, 2, 6, 6}, gen, 1.0);
  std::vector<std::size_t> labels(16);
  for (auto& l : labels) l = gen() % 3;
  auto run = [&] {
    Network net = small_net();
    net.initialize(InitScheme::xavier(), 8);
    for (int it = 0; it < 60; ++it) {
      const auto g = net.forward_backward(x, labels);
      net.apply_update(g.flatten(), {0.05, 0.9, 0.0005});
    }
    return net;
  };
  Network a = run(), b = run();
  EXPECT_TRUE(bitwise_equal_state(a, b));
  EXPECT_EQ(a.weight_bytes(), b.weight_bytes());
  Network fresh = small_net();
  fresh.initialize(InitScheme::xavier(), 8);
  EXPECT_LT(a.loss(x, labels), 0.5 * fresh.loss(x, labels));
  EXPECT_GT(a.accuracy(x, labels, 5), 0.9);
}

TEST(NetworkTest, AccuracyIsChunkInvariant) {
  std::mt19937_64 gen(6);
  Network net = small_net();
  net.initialize(nin_gaussian_policy, 21);
  const Tensor x = testing::random_tensor({13, 2, 6, 6}, gen, 1.0);
  std::vector<std::size_t> labels(13);
  for (auto& l : labels) l = gen() % 3;
  const double ref = net.accuracy(x, labels, 13);
  for (std::size_t chunk : {1, 2, 5, 64}) EXPECT_EQ(net.accuracy(x, labels, chunk), ref);
}

TEST(NetworkTest, ApplyUpdateRejectsWrongLength) {
  Network net = small_net();
  std::vector<double> g(net.parameter_count() + 1);
  EXPECT_THROW(net.apply_update(g, {}), ShapeError);
}

TEST(NetworkTest, ForwardMacs) {
  Network net({3}, {fully_connected(3, 2, 1, 1), softmax_xent()});
  EXPECT_EQ(net.forward_macs_per_sample(), 6u);
}

}  // namespace
}  // namespace treesum::nn
