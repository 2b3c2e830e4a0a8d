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

#include "treesum/sim/exact_sum.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace treesum::sim {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

void ExactSum::clear() {
  for (int i = lo_; i <= hi_; ++i) chunk_[static_cast<std::size_t>(i)] = 0;
  lo_ = kChunks;
  hi_ = -1;
  pending_ = 0;
  count_ = 0;
  nan_ = pos_inf_ = neg_inf_ = false;
  all_neg_zero_ = true;
}

void ExactSum::add_slow(double x) {
  ++count_;
  const auto bits = std::bit_cast<std::uint64_t>(x);
  const bool negative = (bits >> 63) != 0;
  const auto field = static_cast<int>((bits >> 52) & 0x7ff);
  const std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
  if (!(negative && mant == 0 && field == 0)) all_neg_zero_ = false;
  if (field == 0x7ff) {
    if (mant != 0) {
      nan_ = true;
    } else if (negative) {
      neg_inf_ = true;
    } else {
      pos_inf_ = true;
    }
    return;
  }
  if (mant == 0) return;
  deposit(negative, mant, 0);  // subnormal: mant * 2^-1074
}

void ExactSum::add(const ExactSum& other) {
  count_ += other.count_;
  nan_ = nan_ || other.nan_;
  pos_inf_ = pos_inf_ || other.pos_inf_;
  neg_inf_ = neg_inf_ || other.neg_inf_;
  all_neg_zero_ = all_neg_zero_ && other.all_neg_zero_;
  if (other.hi_ < other.lo_) return;
  // Digits of either side are bounded by their pending count times 2^32.
  if (pending_ + other.pending_ + 1 >= kPendingLimit) normalize();
  if (pending_ + other.pending_ + 1 >= kPendingLimit) other.normalize();
  for (int i = other.lo_; i <= other.hi_; ++i) {
    chunk_[static_cast<std::size_t>(i)] += other.chunk_[static_cast<std::size_t>(i)];
  }
  touch(other.lo_, other.hi_);
  pending_ += other.pending_ + 1;
}

void ExactSum::normalize() const {
  if (hi_ < lo_) return;
  // Signed carry propagation: digits below the top end in [0, 2^32), the
  // top digit in [-2^32, 2^32) and carries the sign.
  constexpr std::int64_t kBase = std::int64_t{1} << 32;
  std::int64_t carry = 0;
  int i = lo_;
  for (;; ++i) {
    auto& v = chunk_[static_cast<std::size_t>(i)];
    v += carry;
    if ((i >= hi_ && v >= -kBase && v < kBase) || i == kChunks - 1) break;
    carry = v >> 32;
    v &= kBase - 1;
  }
  if (i > hi_) hi_ = i;
  while (hi_ >= lo_ && chunk_[static_cast<std::size_t>(hi_)] == 0) --hi_;
  while (lo_ <= hi_ && chunk_[static_cast<std::size_t>(lo_)] == 0) ++lo_;
  if (hi_ < lo_) {
    lo_ = kChunks;
    hi_ = -1;
  }
  pending_ = 0;
}

double ExactSum::to_double() const {
  if (nan_ || (pos_inf_ && neg_inf_)) return std::numeric_limits<double>::quiet_NaN();
  if (pos_inf_) return std::numeric_limits<double>::infinity();
  if (neg_inf_) return -std::numeric_limits<double>::infinity();
  normalize();
  if (hi_ < lo_) return all_neg_zero_ && count_ > 0 ? -0.0 : 0.0;

  // Magnitude digits in [0, 2^32); only indices lo_..top are written.
  std::array<std::uint64_t, kChunks> d;
  const bool negative = chunk_[static_cast<std::size_t>(hi_)] < 0;
  int top = hi_;
  if (negative) {
    std::int64_t borrow = 0;
    for (int i = lo_; i <= hi_; ++i) {
      const std::int64_t v = -chunk_[static_cast<std::size_t>(i)] + borrow;
      borrow = v >> 32;
      d[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(v & 0xffffffff);
    }
  } else {
    for (int i = lo_; i <= hi_; ++i) d[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(chunk_[static_cast<std::size_t>(i)]);
  }
  while (top >= lo_ && d[static_cast<std::size_t>(top)] == 0) --top;
  if (top < lo_) return 0.0;
  auto digit = [&](int i) { return i >= lo_ && i <= top ? d[static_cast<std::size_t>(i)] : std::uint64_t{0}; };

  // The top three digits hold at least 65 significant bits whenever top >= 2;
  // for smaller tops they are the whole value.
  const int base = std::max(top - 2, 0);
  const u128 window = (static_cast<u128>(digit(base + 2)) << 64) | (static_cast<u128>(digit(base + 1)) << 32) |
                      digit(base);
  const auto window_hi = static_cast<std::uint64_t>(window >> 64);
  const int window_bits = window_hi != 0 ? 128 - std::countl_zero(window_hi)
                                         : 64 - std::countl_zero(static_cast<std::uint64_t>(window));
  const int msb = 32 * base + window_bits - 1;
  std::uint64_t bits = 0;
  if (msb <= 52) {
    bits = static_cast<std::uint64_t>(window);  // subnormal or smallest binade: field bits equal the integer
  } else {
    const int shift = window_bits - 53;  // window bits below the retained mantissa
    std::uint64_t mant = static_cast<std::uint64_t>(window >> shift);
    const bool guard = ((window >> (shift - 1)) & 1) != 0;
    bool sticky = (window & ((u128{1} << (shift - 1)) - 1)) != 0;
    for (int i = lo_; i < base && !sticky; ++i) sticky = d[static_cast<std::size_t>(i)] != 0;
    int p = msb;
    if (guard && (sticky || (mant & 1))) {
      ++mant;
      if (mant == (std::uint64_t{1} << 53)) {
        mant >>= 1;
        ++p;
      }
    }
    const int field = p - 51;
    if (field >= 0x7ff) {
      return negative ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    }
    bits = (static_cast<std::uint64_t>(field) << 52) | (mant & ((std::uint64_t{1} << 52) - 1));
  }
  if (negative) bits |= std::uint64_t{1} << 63;
  return std::bit_cast<double>(bits);
}

}  // namespace treesum::sim
