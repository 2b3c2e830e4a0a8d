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
#include <span>
#include <vector>

#include "treesum/nn/tensor.hpp"

namespace treesum::train {

struct SampleDims {
  std::size_t channels = 1;
  std::size_t height = 8;
  std::size_t width = 8;
  friend bool operator==(const SampleDims&, const SampleDims&) = default;
};

struct Dataset {
  nn::Tensor inputs;  // (n, c, h, w)
  std::vector<std::size_t> labels;
  std::size_t num_classes = 0;
  std::uint64_t seed = 0;

  std::size_t size() const { return labels.size(); }

  /// Items [first, first + count) with wraparound past the end.
  void batch(std::size_t first, std::size_t count, nn::Tensor& x, std::vector<std::size_t>& y) const;
};

struct DatasetSplit {
  Dataset train;
  Dataset test;
};

/// Gaussian inputs labelled by the argmax of a frozen random teacher
/// (3x3 convolution, ReLU, 2x2 max pool when the grid is even,
/// fully-connected; logits centred per class). Twice n candidates are drawn
/// and the half with the largest top-two logit margin is kept, in draw
/// order. A teacher whose class frequencies fall outside [0.6/K, 1.4/K] is
/// redrawn.
Dataset make_synthetic_dataset(std::uint64_t seed, std::size_t n, const SampleDims& dims,
                               std::size_t num_classes);

/// Train and test sets labelled by the same teacher; the test items are
/// drawn after the training items, so the two never share a sample.
DatasetSplit make_synthetic_split(std::uint64_t seed, std::size_t n_train, std::size_t n_test,
                                  const SampleDims& dims, std::size_t num_classes);

std::vector<std::size_t> class_counts(const Dataset& d);

}  // namespace treesum::train
