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

#include <span>

#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

struct SgdStep {
  double lr = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
};

/// Momentum SGD in the Caffe convention:
///   v <- momentum * v + lr * (g + weight_decay * w);  w <- w - v
void sgd_momentum_update(std::span<double> weights, std::span<double> velocity,
                         std::span<const double> grad, const SgdStep& step);

void sgd_momentum_update(Tensor& weights, Tensor& velocity, const Tensor& grad,
                         const SgdStep& step);

}  // namespace treesum::nn
