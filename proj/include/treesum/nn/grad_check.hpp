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

#include "treesum/nn/network.hpp"
#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

/// |a - n| / max(|a|, |n|, 1e-12)
double relative_error(double analytic, double numeric);

/// Largest relative error between back-propagated parameter gradients and
/// central differences (loss(w + eps) - loss(w - eps)) / (2 eps), taken
/// over every weight and bias. Requires eps in (0, 1e-3]; throws if a
/// perturbed loss is not finite.
double grad_check_finite_diff(const Network& net, const Tensor& input,
                              std::span<const std::size_t> labels, double eps = 1e-5);

/// Same check for the gradient with respect to the network input. Covers
/// parameterless layers directly.
double input_grad_check_finite_diff(const Network& net, const Tensor& input,
                                    std::span<const std::size_t> labels, double eps = 1e-5);

}  // namespace treesum::nn
