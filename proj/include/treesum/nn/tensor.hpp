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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace treesum::nn {

using Shape = std::vector<std::size_t>;

std::string to_string(const Shape& shape);
std::size_t element_count(const Shape& shape);

/// Dense row-major f64 array. Four-dimensional tensors are interpreted as
/// (batch, channels, height, width); lower-rank tensors behave as if
/// padded with trailing extents of 1.
///
/// A default-constructed tensor is empty (rank 0, no values) and is only a
/// placeholder; every other tensor has positive extents whose product is
/// the number of stored values.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape);
  Tensor(Shape shape, std::vector<double> values);

  static Tensor filled(Shape shape, double value);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  /// Extent `axis`, or 1 past the stored rank.
  std::size_t dim(std::size_t axis) const { return axis < shape_.size() ? shape_[axis] : 1; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  double& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    return values_[index(n, c, h, w)];
  }
  double at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return values_[index(n, c, h, w)];
  }

  std::size_t index(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const {
    return ((n * dim(1) + c) * dim(2) + h) * dim(3) + w;
  }

  /// Same values, different extents. Element counts must agree.
  Tensor reshaped(Shape shape) const;

  bool all_finite() const;
  void fill(double value);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

/// Equal shapes and identical bit patterns for every value.
bool bitwise_equal(const Tensor& a, const Tensor& b);

/// max_i |a_i - b_i| / max_i |b_i|; 0 for identical tensors.
double max_relative_difference(const Tensor& a, const Tensor& b);

// Serialization: rank and extents as little-endian u64, then the values as
// little-endian IEEE-754 binary64.
void append_bytes(const Tensor& tensor, std::vector<std::uint8_t>& out);
std::vector<std::uint8_t> to_bytes(const Tensor& tensor);
/// Reads one tensor starting at `offset`; advances `offset` past it.
Tensor from_bytes(std::span<const std::uint8_t> bytes, std::size_t& offset);
Tensor from_bytes(std::span<const std::uint8_t> bytes);

}  // namespace treesum::nn
