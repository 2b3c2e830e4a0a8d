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


#include "treesum/train/dataset.hpp"

#include <gtest/gtest.h>

#include <set>

#include "treesum/error.hpp"
#include "treesum/train/experiment.hpp"

namespace treesum::train {
namespace {

TEST(SyntheticDataset, SameSeedIsBitwiseIdentical) {
  const Dataset a = make_synthetic_dataset(7, 300, {2, 4, 4}, 3);
  const Dataset b = make_synthetic_dataset(7, 300, {2, 4, 4}, 3);
  EXPECT_TRUE(bitwise_equal(a.inputs, b.inputs));
  EXPECT_EQ(a.labels, b.labels);
  const Dataset c = make_synthetic_dataset(8, 300, {2, 4, 4}, 3);
  EXPECT_FALSE(bitwise_equal(a.inputs, c.inputs));
}

TEST(SyntheticDataset, ShapeAndLabelRange) {
  const Dataset d = make_synthetic_dataset(3, 100, {1, 5, 3}, 4);
  EXPECT_EQ(d.inputs.shape(), (nn::Shape{100, 1, 5, 3}));
  EXPECT_EQ(d.size(), 100u);
  for (std::size_t l : d.labels) EXPECT_LT(l, 4u);
}

TEST(SyntheticDataset, TwoClassBalance) {
  const Dataset d = make_synthetic_dataset(11, 10000, {1, 8, 8}, 2);
  const auto counts = class_counts(d);
  for (std::size_t c : counts) {
    EXPECT_GE(c, 3000u);
    EXPECT_LE(c, 7000u);
  }
}

TEST(SyntheticDataset, BalanceAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset d = make_synthetic_dataset(seed, 400, {1, 4, 4}, 4);
    for (std::size_t c : class_counts(d)) {
      EXPECT_GE(c, 60u) << "seed " << seed;
      EXPECT_LE(c, 140u) << "seed " << seed;
    }
  }
}

TEST(SyntheticDataset, Rejects) {
  EXPECT_THROW(make_synthetic_dataset(1, 10, {1, 4, 4}, 1), ConfigError);
  EXPECT_THROW(make_synthetic_dataset(1, 2, {1, 4, 4}, 3), ConfigError);
  EXPECT_THROW(make_synthetic_dataset(1, 10, {0, 4, 4}, 2), ConfigError);
  EXPECT_THROW(make_synthetic_dataset(1, 10, {1, 0, 4}, 2), ConfigError);
}

TEST(SyntheticSplit, DisjointAndDeterministic) {
  const DatasetSplit s = make_synthetic_split(5, 200, 50, {1, 4, 4}, 3);
  EXPECT_EQ(s.train.size(), 200u);
  EXPECT_EQ(s.test.size(), 50u);
  const std::size_t per = 16;
  std::set<std::vector<double>> train_items;
  for (std::size_t i = 0; i < 200; ++i) {
    train_items.emplace(s.train.inputs.values().begin() + static_cast<std::ptrdiff_t>(i * per),
                        s.train.inputs.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
  }
  for (std::size_t i = 0; i < 50; ++i) {
    std::vector<double> item(s.test.inputs.values().begin() + static_cast<std::ptrdiff_t>(i * per),
                             s.test.inputs.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
    EXPECT_EQ(train_items.count(item), 0u) << "test item " << i;
  }
  const DatasetSplit t = make_synthetic_split(5, 200, 50, {1, 4, 4}, 3);
  EXPECT_TRUE(bitwise_equal(s.test.inputs, t.test.inputs));
  EXPECT_EQ(s.test.labels, t.test.labels);
  EXPECT_THROW(make_synthetic_split(5, 200, 0, {1, 4, 4}, 3), ConfigError);
}

TEST(DatasetBatch, WrapsAround) {
  const Dataset d = make_synthetic_dataset(2, 10, {1, 2, 2}, 2);
  nn::Tensor x;
  std::vector<std::size_t> y;
  d.batch(8, 4, x, y);
  ASSERT_EQ(x.shape(), (nn::Shape{4, 1, 2, 2}));
  const std::size_t src[] = {8, 9, 0, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(y[i], d.labels[src[i]]);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(x[i * 4 + j], d.inputs[src[i] * 4 + j]);
  }
  d.batch(23, 1, x, y);
  EXPECT_EQ(y[0], d.labels[3]);
}

TEST(Learnability, TwoLayerStudentBeatsChance) {
  ExperimentConfig c;
  c.arch = "toy-fc";
  c.dataset.train = 8000;
  c.dataset.test = 1000;
  c.hyper.batch_size = 16;
  c.hyper.epochs = 1;
  c.hyper.lr_schedule.base_lr = 0.01;
  c.eval_interval = 1000;
  c.hyper.seed = 3;
  const RunResult r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 500u);
  ASSERT_FALSE(r.diverged);
  EXPECT_GT(r.final_test_acc, 1.0 / 4.0 + 0.20);
}

}  // namespace
}  // namespace treesum::train
