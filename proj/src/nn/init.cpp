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

#include "treesum/nn/init.hpp"

#include <cmath>
#include <stdexcept>

#include "treesum/error.hpp"
#include "treesum/nn/rng.hpp"

namespace treesum::nn {

std::pair<Tensor, Tensor> init_weights(const LayerSpec& layer, const InitScheme& scheme,
                                       std::uint64_t seed) {
  if (!layer.has_parameters()) {
    throw ShapeError("init_weights: " + std::string(to_string(layer.kind)) + " has no parameters");
  }
  Tensor w(layer.weight_shape());
  Tensor b = Tensor::filled(layer.bias_shape(), scheme.bias);
  Rng rng(seed);
  switch (scheme.kind) {
    case InitScheme::Kind::kGaussian:
      if (!(scheme.value > 0.0)) throw std::invalid_argument("gaussian init: std must be positive");
      for (double& v : w.values()) v = rng.normal(0.0, scheme.value);
      break;
    case InitScheme::Kind::kXavier: {
      const double fan_in = static_cast<double>(layer.in_channels * layer.filter_h * layer.filter_w);
      const double limit = std::sqrt(3.0 / fan_in);
      for (double& v : w.values()) v = rng.uniform(-limit, limit);
      break;
    }
    case InitScheme::Kind::kConstant:
      w.fill(scheme.value);
      break;
  }
  return {std::move(w), std::move(b)};
}

InitScheme nin_gaussian_policy(const LayerSpec& layer) {
  const bool pointwise = layer.kind == LayerKind::kConvolution && layer.filter_h == 1 && layer.filter_w == 1;
  return InitScheme::gaussian(pointwise ? 0.01 : 0.05);
}

}  // namespace treesum::nn
