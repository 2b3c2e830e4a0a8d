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

#include <stdexcept>
#include <string>

#include "treesum/error.hpp"

namespace treesum::nn {

void sgd_momentum_update(std::span<double> weights, std::span<double> velocity,
                         std::span<const double> grad, const SgdStep& step) {
  if (weights.size() != velocity.size() || weights.size() != grad.size()) {
    throw ShapeError("sgd update: weights/velocity/grad sizes " + std::to_string(weights.size()) +
                     "/" + std::to_string(velocity.size()) + "/" + std::to_string(grad.size()));
  }
  if (!(step.lr > 0.0)) throw std::invalid_argument("sgd update: lr must be positive");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    velocity[i] = step.momentum * velocity[i] + step.lr * (grad[i] + step.weight_decay * weights[i]);
    weights[i] -= velocity[i];
  }
}

void sgd_momentum_update(Tensor& weights, Tensor& velocity, const Tensor& grad,
                         const SgdStep& step) {
  if (weights.shape() != velocity.shape() || weights.shape() != grad.shape()) {
    throw ShapeError("sgd update: shapes " + to_string(weights.shape()) + ", " +
                     to_string(velocity.shape()) + ", " + to_string(grad.shape()) + " differ");
  }
  sgd_momentum_update(weights.values(), velocity.values(), grad.values(), step);
}

}  // namespace treesum::nn
