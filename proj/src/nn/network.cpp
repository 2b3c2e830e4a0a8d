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

#include <algorithm>
#include <limits>
#include <string>

#include "treesum/error.hpp"
#include "treesum/nn/loss.hpp"
#include "treesum/nn/rng.hpp"

namespace treesum::nn {

namespace {
constexpr std::size_t kNoSlot = std::numeric_limits<std::size_t>::max();
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> flat;
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) n += weights[i].size() + biases[i].size();
  flat.reserve(n);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    flat.insert(flat.end(), weights[i].values().begin(), weights[i].values().end());
    flat.insert(flat.end(), biases[i].values().begin(), biases[i].values().end());
  }
  return flat;
}

Network::Network(Shape sample_shape, std::vector<LayerSpec> layers)
    : sample_shape_(std::move(sample_shape)), layers_(std::move(layers)) {
  if (sample_shape_.empty() || sample_shape_.size() > 3) {
    throw ShapeError("network sample shape must be (channels[, height[, width]]), got " +
                     to_string(sample_shape_));
  }
  while (sample_shape_.size() < 3) sample_shape_.push_back(1);
  if (layers_.empty() || layers_.back().kind != LayerKind::kSoftmaxXent) {
    throw ShapeError("network must end with a softmax-xent layer");
  }
  Shape shape = shape_for_batch(1);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    if (l.kind == LayerKind::kSoftmaxXent && i + 1 != layers_.size()) {
      throw ShapeError("layer " + std::to_string(i) + " (softmax-xent): must be the last layer");
    }
    shape = output_shape(l, shape, i);
    if (l.has_parameters()) {
      param_slot_.push_back(params_.size());
      params_.push_back({i, Tensor(l.weight_shape()), Tensor(l.bias_shape()),
                         Tensor(l.weight_shape()), Tensor(l.bias_shape())});
    } else {
      param_slot_.push_back(kNoSlot);
    }
  }
  num_classes_ = shape[1];
}

Shape Network::shape_for_batch(std::size_t batch) const {
  return {batch, sample_shape_[0], sample_shape_[1], sample_shape_[2]};
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.weights.size() + p.bias.size();
  return n;
}

void Network::initialize(const InitPolicy& policy, std::uint64_t seed) {
  for (auto& p : params_) {
    const LayerSpec& l = layers_[p.layer];
    auto [w, b] = init_weights(l, policy(l), derive_stream(seed, p.layer));
    p.weights = std::move(w);
    p.bias = std::move(b);
    p.weight_velocity.fill(0.0);
    p.bias_velocity.fill(0.0);
  }
}

void Network::initialize(const InitScheme& scheme, std::uint64_t seed) {
  initialize([&](const LayerSpec&) { return scheme; }, seed);
}

Tensor Network::forward(const Tensor& input) const {
  if (input.rank() != 4 || input.shape() != shape_for_batch(input.dim(0))) {
    throw ShapeError("network input expected (batch, " + std::to_string(sample_shape_[0]) + ", " +
                     std::to_string(sample_shape_[1]) + ", " + std::to_string(sample_shape_[2]) +
                     "), got " + to_string(input.shape()));
  }
  Tensor x = input;
  static const Tensor kNone;
  for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
    const std::size_t slot = param_slot_[i];
    const Tensor& w = slot == kNoSlot ? kNone : params_[slot].weights;
    const Tensor& b = slot == kNoSlot ? kNone : params_[slot].bias;
    x = layer_forward(layers_[i], w, b, x, i);
  }
  return x;
}

Gradients Network::forward_backward(const Tensor& input, std::span<const std::size_t> labels,
                                    double normalizer) const {
  if (input.rank() != 4 || input.shape() != shape_for_batch(input.dim(0))) {
    throw ShapeError("network input expected sample shape " + to_string(sample_shape_) + ", got " +
                     to_string(input.shape()));
  }
  const std::size_t body = layers_.size() - 1;
  std::vector<Tensor> acts;
  acts.reserve(body + 1);
  acts.push_back(input);
  static const Tensor kNone;
  for (std::size_t i = 0; i < body; ++i) {
    const std::size_t slot = param_slot_[i];
    const Tensor& w = slot == kNoSlot ? kNone : params_[slot].weights;
    const Tensor& b = slot == kNoSlot ? kNone : params_[slot].bias;
    acts.push_back(layer_forward(layers_[i], w, b, acts.back(), i));
  }
  const double norm = normalizer > 0.0 ? normalizer : static_cast<double>(input.dim(0));
  LossResult lr = loss_softmax_xent(acts.back(), labels, norm);

  Gradients g;
  g.loss = lr.loss;
  g.weights.resize(params_.size());
  g.biases.resize(params_.size());
  Tensor grad = std::move(lr.grad_logits);
  for (std::size_t i = body; i-- > 0;) {
    const std::size_t slot = param_slot_[i];
    const Tensor& w = slot == kNoSlot ? kNone : params_[slot].weights;
    LayerGradients lg = layer_backward(layers_[i], w, acts[i], grad, i);
    if (slot != kNoSlot) {
      g.weights[slot] = std::move(lg.grad_w);
      g.biases[slot] = std::move(lg.grad_b);
    }
    grad = std::move(lg.grad_in);
  }
  g.input = std::move(grad);
  return g;
}

double Network::loss(const Tensor& input, std::span<const std::size_t> labels) const {
  return loss_softmax_xent(forward(input), labels).loss;
}

std::vector<std::size_t> Network::predict(const Tensor& input) const {
  const Tensor logits = forward(input);
  const std::size_t batch = logits.dim(0);
  const std::size_t k = logits.dim(1);
  std::vector<std::size_t> out(batch);
  for (std::size_t n = 0; n < batch; ++n) {
    const double* row = logits.data() + n * k;
    out[n] = static_cast<std::size_t>(std::max_element(row, row + k) - row);
  }
  return out;
}

double Network::accuracy(const Tensor& inputs, std::span<const std::size_t> labels,
                         std::size_t chunk) const {
  const std::size_t n = inputs.dim(0);
  if (labels.size() != n) throw ShapeError("accuracy: label count does not match inputs");
  if (n == 0) return 0.0;
  const std::size_t per = inputs.size() / n;
  std::size_t correct = 0;
  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t count = std::min(chunk, n - start);
    std::vector<double> vals(inputs.values().begin() + static_cast<std::ptrdiff_t>(start * per),
                             inputs.values().begin() + static_cast<std::ptrdiff_t>((start + count) * per));
    const auto pred = predict(Tensor(shape_for_batch(count), std::move(vals)));
    for (std::size_t i = 0; i < count; ++i) correct += pred[i] == labels[start + i];
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

void Network::apply_update(std::span<const double> flat_grad, const SgdStep& step) {
  if (flat_grad.size() != parameter_count()) {
    throw ShapeError("apply_update: gradient has " + std::to_string(flat_grad.size()) +
                     " values, network has " + std::to_string(parameter_count()));
  }
  std::size_t offset = 0;
  for (auto& p : params_) {
    sgd_momentum_update(p.weights.values(), p.weight_velocity.values(),
                        flat_grad.subspan(offset, p.weights.size()), step);
    offset += p.weights.size();
    sgd_momentum_update(p.bias.values(), p.bias_velocity.values(),
                        flat_grad.subspan(offset, p.bias.size()), step);
    offset += p.bias.size();
  }
}

std::size_t Network::forward_macs_per_sample() const {
  Shape shape = shape_for_batch(1);
  std::size_t macs = 0;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    macs += forward_macs(layers_[i], shape);
    shape = output_shape(layers_[i], shape, i);
  }
  return macs;
}

std::vector<std::uint8_t> Network::weight_bytes() const {
  std::vector<std::uint8_t> out;
  for (const auto& p : params_) {
    append_bytes(p.weights, out);
    append_bytes(p.bias, out);
  }
  return out;
}

std::vector<double> Network::flat_weights() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& p : params_) {
    out.insert(out.end(), p.weights.values().begin(), p.weights.values().end());
    out.insert(out.end(), p.bias.values().begin(), p.bias.values().end());
  }
  return out;
}

bool bitwise_equal_state(const Network& a, const Network& b) {
  const auto& pa = a.parameters();
  const auto& pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (!bitwise_equal(pa[i].weights, pb[i].weights) || !bitwise_equal(pa[i].bias, pb[i].bias) ||
        !bitwise_equal(pa[i].weight_velocity, pb[i].weight_velocity) ||
        !bitwise_equal(pa[i].bias_velocity, pb[i].bias_velocity)) {
      return false;
    }
  }
  return true;
}

}  // namespace treesum::nn
