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
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "treesum/nn/init.hpp"
#include "treesum/nn/layer.hpp"
#include "treesum/nn/optimizer.hpp"
#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

/// Parameters and momentum state of one parameterized layer.
struct Parameter {
  std::size_t layer = 0;
  Tensor weights;
  Tensor bias;
  Tensor weight_velocity;
  Tensor bias_velocity;
};

struct Gradients {
  double loss = 0.0;
  std::vector<Tensor> weights;  // one per Parameter, same order
  std::vector<Tensor> biases;
  Tensor input;  // gradient with respect to the network input

  /// Flat view in parameter order: weights of slot 0, bias of slot 0, ...
  std::vector<double> flatten() const;
};

/// A sequential network terminated by a softmax-xent layer. Geometry is
/// checked once at construction against the per-sample input shape.
class Network {
 public:
  using InitPolicy = std::function<InitScheme(const LayerSpec&)>;

  Network(Shape sample_shape, std::vector<LayerSpec> layers);

  const Shape& sample_shape() const { return sample_shape_; }
  const std::vector<LayerSpec>& layers() const { return layers_; }
  std::vector<Parameter>& parameters() { return params_; }
  const std::vector<Parameter>& parameters() const { return params_; }
  std::size_t num_classes() const { return num_classes_; }

  /// Total number of scalar parameters (weights and biases).
  std::size_t parameter_count() const;

  /// Draws every layer from its own stream derive_stream(seed, layer_index)
  /// and clears the momentum state.
  void initialize(const InitPolicy& policy, std::uint64_t seed);
  void initialize(const InitScheme& scheme, std::uint64_t seed);

  /// Logits: the input to the terminal softmax-xent layer.
  Tensor forward(const Tensor& input) const;

  /// Loss and parameter gradients for a (shard of a) batch. `normalizer`
  /// is the global batch size; 0 means the local batch size.
  Gradients forward_backward(const Tensor& input, std::span<const std::size_t> labels,
                             double normalizer = 0.0) const;

  /// Scalar loss only (used by finite differences).
  double loss(const Tensor& input, std::span<const std::size_t> labels) const;

  std::vector<std::size_t> predict(const Tensor& input) const;
  double accuracy(const Tensor& inputs, std::span<const std::size_t> labels,
                  std::size_t chunk = 256) const;

  /// Applies a flat gradient (Gradients::flatten order) with momentum SGD.
  void apply_update(std::span<const double> flat_grad, const SgdStep& step);

  /// Forward multiply-accumulates per sample.
  std::size_t forward_macs_per_sample() const;

  /// Serialized weights and biases (tensor encoding, parameter order).
  std::vector<std::uint8_t> weight_bytes() const;

  /// Flat copy of all weights and biases in parameter order.
  std::vector<double> flat_weights() const;

 private:
  Shape shape_for_batch(std::size_t batch) const;

  Shape sample_shape_;
  std::vector<LayerSpec> layers_;
  std::vector<Parameter> params_;
  std::vector<std::size_t> param_slot_;  // layer index -> params_ index or npos
  std::size_t num_classes_ = 0;
};

/// Weights and velocities of two networks are bitwise identical.
bool bitwise_equal_state(const Network& a, const Network& b);

}  // namespace treesum::nn
