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

#include <cstdint>
#include <utility>

#include "treesum/nn/layer.hpp"
#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

struct InitScheme {
  enum class Kind { kGaussian, kXavier, kConstant };
  Kind kind = Kind::kGaussian;
  double value = 0.01;  // std for gaussian, fill value for constant; unused by xavier
  double bias = 0.0;    // biases are always filled with this constant

  static InitScheme gaussian(double std, double bias = 0.0) { return {Kind::kGaussian, std, bias}; }
  static InitScheme xavier(double bias = 0.0) { return {Kind::kXavier, 0.0, bias}; }
  static InitScheme constant(double c, double bias = 0.0) { return {Kind::kConstant, c, bias}; }
};

/// Weights and bias for a parameterized layer, drawn from Rng(seed).
/// Xavier draws uniform in +-sqrt(3 / fan_in), fan_in = in_channels * filter area.
std::pair<Tensor, Tensor> init_weights(const LayerSpec& layer, const InitScheme& scheme,
                                       std::uint64_t seed);

/// Gaussian, std 0.01 for 1x1 convolutions and 0.05 otherwise, zero bias.
InitScheme nin_gaussian_policy(const LayerSpec& layer);

}  // namespace treesum::nn
