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
#include <string_view>

#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

enum class LayerKind { kFullyConnected, kConvolution, kRelu, kMaxPool, kSoftmaxXent };

std::string_view to_string(LayerKind kind);

/// Geometry of one layer. Fully-connected layers are convolutions whose
/// filter covers the whole input activation map, so they share the
/// convolution weight layout (out_channels, in_channels, filter_h, filter_w)
/// and produce a 1x1 output map.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t filter_h = 1;
  std::size_t filter_w = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;

  bool has_parameters() const {
    return kind == LayerKind::kConvolution || kind == LayerKind::kFullyConnected;
  }
  Shape weight_shape() const { return {out_channels, in_channels, filter_h, filter_w}; }
  Shape bias_shape() const { return {out_channels}; }

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

LayerSpec convolution(std::size_t in_channels, std::size_t out_channels, std::size_t filter,
                      std::size_t stride = 1, std::size_t pad = 0);
LayerSpec fully_connected(std::size_t in_channels, std::size_t out_channels,
                          std::size_t in_h = 1, std::size_t in_w = 1);
LayerSpec relu();
LayerSpec max_pool(std::size_t filter, std::size_t stride, std::size_t pad = 0);
LayerSpec softmax_xent();

/// Validates `layer` against a (batch, channels, height, width) input and
/// returns the output shape. Throws ShapeError mentioning `layer_index`.
Shape output_shape(const LayerSpec& layer, const Shape& input, std::size_t layer_index = 0);

/// Forward activations. For softmax-xent this is the softmax over channels.
Tensor layer_forward(const LayerSpec& layer, const Tensor& weights, const Tensor& bias,
                     const Tensor& input, std::size_t layer_index = 0);

struct LayerGradients {
  Tensor grad_in;
  Tensor grad_w;  // empty for parameterless kinds
  Tensor grad_b;  // empty for parameterless kinds
};

/// Backward pass. Weight and bias gradients are summed over the batch,
/// one sample at a time in ascending sample order. For softmax-xent the
/// result is the vector-Jacobian product of the softmax; a loss-terminated
/// network normally bypasses it through loss_softmax_xent.
LayerGradients layer_backward(const LayerSpec& layer, const Tensor& weights, const Tensor& input,
                              const Tensor& grad_out, std::size_t layer_index = 0);

/// Forward multiply-accumulates for one sample, 0 for parameterless kinds.
std::size_t forward_macs(const LayerSpec& layer, const Shape& input);

}  // namespace treesum::nn
