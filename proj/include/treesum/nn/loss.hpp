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

#include "treesum/nn/tensor.hpp"

namespace treesum::nn {

struct LossResult {
  double loss = 0.0;
  Tensor grad_logits;
};

/// Mean softmax cross-entropy over the batch. `logits` is (batch, classes)
/// with optional trailing singleton extents; grad_logits has the same
/// shape and equals (softmax - one_hot) / batch.
LossResult loss_softmax_xent(const Tensor& logits, std::span<const std::size_t> labels);

/// Same, but divides the summed loss and gradient by `normalizer` instead
/// of the local batch size. A worker holding a shard of a global batch of
/// size B passes B so that shard results add up to the full-batch values.
LossResult loss_softmax_xent(const Tensor& logits, std::span<const std::size_t> labels,
                             double normalizer);

}  // namespace treesum::nn
