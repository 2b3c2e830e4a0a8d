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

#include "treesum/nn/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "treesum/error.hpp"

namespace treesum::nn {

std::string to_string(const Shape& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ')';
  return os.str();
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

namespace {

void check_extents(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one extent");
  for (std::size_t e : shape) {
    if (e == 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape));
  }
}

}  // namespace

Tensor::Tensor(Shape shape) : shape_(std::move(shape)) {
  check_extents(shape_);
  values_.assign(element_count(shape_), 0.0);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  check_extents(shape_);
  if (element_count(shape_) != values_.size()) {
    throw ShapeError("shape " + to_string(shape_) + " needs " +
                     std::to_string(element_count(shape_)) + " values, got " +
                     std::to_string(values_.size()));
  }
}

Tensor Tensor::filled(Shape shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::reshaped(Shape shape) const {
  return Tensor(std::move(shape), values_);
}

bool Tensor::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool bitwise_equal(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
  }
  return true;
}

double max_relative_difference(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("cannot compare " + to_string(a.shape()) + " with " + to_string(b.shape()));
  }
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  if (diff == 0.0) return 0.0;
  return scale > 0.0 ? diff / scale : diff;
}

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  if (offset + 8 > bytes.size()) throw ShapeError("truncated tensor encoding");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  offset += 8;
  return v;
}

}  // namespace

void append_bytes(const Tensor& tensor, std::vector<std::uint8_t>& out) {
  out.reserve(out.size() + 8 * (1 + tensor.rank() + tensor.size()));
  put_u64(out, tensor.rank());
  for (std::size_t e : tensor.shape()) put_u64(out, e);
  for (double v : tensor.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
}

std::vector<std::uint8_t> to_bytes(const Tensor& tensor) {
  std::vector<std::uint8_t> out;
  append_bytes(tensor, out);
  return out;
}

Tensor from_bytes(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  const std::uint64_t rank = get_u64(bytes, offset);
  if (rank == 0 || rank > 8) throw ShapeError("bad tensor rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto& e : shape) e = get_u64(bytes, offset);
  const std::size_t n = element_count(shape);
  if (n > (bytes.size() - offset) / 8) throw ShapeError("truncated tensor encoding");
  std::vector<double> values(n);
  for (auto& v : values) v = std::bit_cast<double>(get_u64(bytes, offset));
  return Tensor(std::move(shape), std::move(values));
}

Tensor from_bytes(std::span<const std::uint8_t> bytes) {
  std::size_t offset = 0;
  Tensor t = from_bytes(bytes, offset);
  if (offset != bytes.size()) throw ShapeError("trailing bytes after tensor encoding");
  return t;
}

}  // namespace treesum::nn
