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

#include "treesum/nn/optimizer.hpp"

#include <gtest/gtest.h>

#include "treesum/error.hpp"

namespace treesum::nn {
namespace {

TEST(SgdMomentumTest, SingleStep) {
  Tensor w({1}, {1.0}), v({1}, {0.0});
  sgd_momentum_update(w, v, Tensor({1}, {0.5}), {0.1, 0.9, 0.0});
  EXPECT_NEAR(v[0], 0.05, 1e-15);
  EXPECT_NEAR(w[0], 0.95, 1e-15);
}

TEST(SgdMomentumTest, MomentumAccumulates) {
  Tensor w({1}, {1.0}), v({1}, {0.0});
  const Tensor g({1}, {0.5});
  sgd_momentum_update(w, v, g, {0.1, 0.9, 0.0});
  sgd_momentum_update(w, v, g, {0.1, 0.9, 0.0});
  EXPECT_NEAR(v[0], 0.095, 1e-15);
  EXPECT_NEAR(w[0], 0.855, 1e-15);
}

TEST(SgdMomentumTest, WeightDecayAddsToGradient) {
  Tensor w({1}, {1.0}), v({1}, {0.0});
  sgd_momentum_update(w, v, Tensor({1}, {0.5}), {0.1, 0.9, 0.1});
  EXPECT_NEAR(v[0], 0.06, 1e-15);
  EXPECT_NEAR(w[0], 0.94, 1e-15);
}

TEST(SgdMomentumTest, RejectsMismatchAndBadLr) {
  Tensor w({2}), v({2});
  EXPECT_THROW(sgd_momentum_update(w, v, Tensor({3}), {}), ShapeError);
  EXPECT_THROW(sgd_momentum_update(w, v, Tensor({2}), {0.0, 0.9, 0.0}), std::invalid_argument);
}

}  // namespace
}  // namespace treesum::nn
