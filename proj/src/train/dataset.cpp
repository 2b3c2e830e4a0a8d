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

#include "treesum/train/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "treesum/error.hpp"
#include "treesum/nn/network.hpp"
#include "treesum/nn/rng.hpp"

namespace treesum::train {

void Dataset::batch(std::size_t first, std::size_t count, nn::Tensor& x, std::vector<std::size_t>& y) const {
  const std::size_t n = size();
  if (n == 0) throw ShapeError("batch from an empty dataset");
  const std::size_t per = inputs.size() / n;
  std::vector<double> vals(count * per);
  y.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t src = (first + i) % n;
    std::copy_n(inputs.data() + src * per, per, vals.data() + i * per);
    y[i] = labels[src];
  }
  x = nn::Tensor({count, inputs.dim(1), inputs.dim(2), inputs.dim(3)}, std::move(vals));
}

std::vector<std::size_t> class_counts(const Dataset& d) {
  std::vector<std::size_t> counts(d.num_classes, 0);
  for (std::size_t l : d.labels) ++counts.at(l);
  return counts;
}

namespace {

constexpr std::size_t kTeacherHidden = 4;
constexpr int kTeacherAttempts = 100;
// Only the upper half of candidates by teacher margin become items.
constexpr std::size_t kCandidateFactor = 2;

Dataset generate(std::uint64_t seed, std::size_t n, const SampleDims& dims, std::size_t k, std::size_t balance_n) {
  if (k < 2) throw ConfigError("synthetic dataset needs at least 2 classes, got " + std::to_string(k));
  if (balance_n < k) {
    throw ConfigError("synthetic dataset needs at least as many items as classes (" + std::to_string(balance_n) +
                      " < " + std::to_string(k) + ")");
  }
  if (dims.channels == 0 || dims.height == 0 || dims.width == 0) {
    throw ConfigError("synthetic dataset dimensions must be >= 1");
  }
  Dataset d;
  d.seed = seed;
  d.num_classes = k;
  const std::size_t per = dims.channels * dims.height * dims.width;
  const std::size_t pool_n = kCandidateFactor * n;
  nn::Tensor pool({pool_n, dims.channels, dims.height, dims.width});
  nn::Rng rng(nn::derive_stream(seed, 0));
  for (double& v : pool.values()) v = rng.normal();

  const nn::Network::InitPolicy scaled = [](const nn::LayerSpec& l) {
    const double fan_in = static_cast<double>(l.in_channels * l.filter_h * l.filter_w);
    return nn::InitScheme::gaussian(1.0 / std::sqrt(fan_in));
  };
  std::vector<nn::LayerSpec> layers = {nn::convolution(dims.channels, kTeacherHidden, 3, 1, 1), nn::relu()};
  std::size_t th = dims.height;
  std::size_t tw = dims.width;
  if (th % 2 == 0 && tw % 2 == 0) {
    layers.push_back(nn::max_pool(2, 2));
    th /= 2;
    tw /= 2;
  }
  layers.push_back(nn::fully_connected(kTeacherHidden, k, th, tw));
  layers.push_back(nn::softmax_xent());
  nn::Network teacher({dims.channels, dims.height, dims.width}, layers);

  std::vector<std::size_t> label(pool_n);
  std::vector<double> margin(pool_n);
  for (int attempt = 0; attempt < kTeacherAttempts; ++attempt) {
    teacher.initialize(scaled, nn::derive_stream(seed, 1 + static_cast<std::uint64_t>(attempt)));
    const nn::Tensor logits = teacher.forward(pool);
    std::vector<double> mean(k, 0.0);
    for (std::size_t i = 0; i < pool_n; ++i) {
      for (std::size_t c = 0; c < k; ++c) mean[c] += logits[i * k + c];
    }
    for (double& m : mean) m /= static_cast<double>(pool_n);
    for (std::size_t i = 0; i < pool_n; ++i) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < k; ++c) {
        if (logits[i * k + c] - mean[c] > logits[i * k + best] - mean[best]) best = c;
      }
      double runner = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        if (c != best) runner = std::max(runner, logits[i * k + c] - mean[c]);
      }
      label[i] = best;
      margin[i] = logits[i * k + best] - mean[best] - runner;
    }
    std::vector<double> sorted = margin;
    auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(pool_n - n);
    std::nth_element(sorted.begin(), mid, sorted.end());
    const double threshold = *mid;

    std::vector<double> vals;
    vals.reserve(n * per);
    d.labels.clear();
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < pool_n && d.labels.size() < n; ++i) {
      if (margin[i] < threshold) continue;
      vals.insert(vals.end(), pool.values().begin() + static_cast<std::ptrdiff_t>(i * per),
                  pool.values().begin() + static_cast<std::ptrdiff_t>((i + 1) * per));
      if (d.labels.size() < balance_n) ++counts[label[i]];
      d.labels.push_back(label[i]);
    }
    const double lo = 0.6 * static_cast<double>(balance_n) / static_cast<double>(k);
    const double hi = 1.4 * static_cast<double>(balance_n) / static_cast<double>(k);
    if (std::all_of(counts.begin(), counts.end(), [&](std::size_t c) {
          return static_cast<double>(c) >= lo && static_cast<double>(c) <= hi;
        })) {
      d.inputs = nn::Tensor({n, dims.channels, dims.height, dims.width}, std::move(vals));
      return d;
    }
  }
  throw ConfigError("could not draw a class-balanced teacher in " + std::to_string(kTeacherAttempts) + " attempts");
}

}  // namespace

Dataset make_synthetic_dataset(std::uint64_t seed, std::size_t n, const SampleDims& dims, std::size_t num_classes) {
  return generate(seed, n, dims, num_classes, n);
}

DatasetSplit make_synthetic_split(std::uint64_t seed, std::size_t n_train, std::size_t n_test,
                                  const SampleDims& dims, std::size_t num_classes) {
  if (n_test == 0) throw ConfigError("test split must hold at least one item");
  Dataset all = generate(seed, n_train + n_test, dims, num_classes, n_train);
  const std::size_t per = all.inputs.size() / all.size();
  auto slice = [&](std::size_t first, std::size_t count) {
    Dataset d;
    d.seed = seed;
    d.num_classes = num_classes;
    std::vector<double> vals(all.inputs.values().begin() + static_cast<std::ptrdiff_t>(first * per),
                             all.inputs.values().begin() + static_cast<std::ptrdiff_t>((first + count) * per));
    d.inputs = nn::Tensor({count, dims.channels, dims.height, dims.width}, std::move(vals));
    d.labels.assign(all.labels.begin() + static_cast<std::ptrdiff_t>(first),
                    all.labels.begin() + static_cast<std::ptrdiff_t>(first + count));
    return d;
  };
  return {slice(0, n_train), slice(n_train, n_test)};
}

}  // namespace treesum::train
