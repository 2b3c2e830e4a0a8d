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

#include "treesum/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treesum/error.hpp"

namespace treesum::nn {

LossResult loss_softmax_xent(const Tensor& logits, std::span<const std::size_t> labels) {
  return loss_softmax_xent(logits, labels, static_cast<double>(logits.dim(0)));
}

LossResult loss_softmax_xent(const Tensor& logits, std::span<const std::size_t> labels,
                             double normalizer) {
  if (logits.empty() || logits.rank() > 4 || logits.dim(2) != 1 || logits.dim(3) != 1) {
    throw ShapeError("softmax-xent expects (batch, classes) logits, got " + to_string(logits.shape()));
  }
  const std::size_t batch = logits.dim(0);
  const std::size_t classes = logits.dim(1);
  if (labels.size() != batch) {
    throw ShapeError("softmax-xent: " + std::to_string(labels.size()) + " labels for batch of " +
                     std::to_string(batch));
  }
  if (!(normalizer > 0.0)) throw std::invalid_argument("softmax-xent: normalizer must be positive");
  for (std::size_t n = 0; n < batch; ++n) {
    if (labels[n] >= classes) {
      throw std::out_of_range("softmax-xent: label " + std::to_string(labels[n]) + " at index " +
                              std::to_string(n) + " outside [0, " + std::to_string(classes) + ")");
    }
  }

  LossResult r{0.0, Tensor(logits.shape())};
  double total = 0.0;
  for (std::size_t n = 0; n < batch; ++n) {
    const double* row = logits.data() + n * classes;
    double* g = r.grad_logits.data() + n * classes;
    const double m = *std::max_element(row, row + classes);
    double z = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      g[k] = std::exp(row[k] - m);
      z += g[k];
    }
    total += (m - row[labels[n]]) + std::log(z);
    for (std::size_t k = 0; k < classes; ++k) {
      const double p = g[k] / z;
      g[k] = (p - (k == labels[n] ? 1.0 : 0.0)) / normalizer;
    }
  }
  r.loss = total / normalizer;
  return r;
}

}  // namespace treesum::nn
