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

#include <array>
#include <bit>
#include <cstdint>

namespace treesum::sim {

/// Exact sum of doubles. Every finite double is an integer multiple of
/// 2^-1074; the accumulator holds that integer in base-2^32 digits, so adds
/// and merges never round. to_double() rounds once, to nearest even, so the
/// result does not depend on the order or grouping of the additions.
class ExactSum {
 public:
  ExactSum() { chunk_.fill(0); }

  void clear();
  void add(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    const auto field = static_cast<unsigned>((bits >> 52) & 0x7ff);
    if (field - 1 >= 0x7fe) return add_slow(x);  // zero, subnormal, inf, nan
    ++count_;
    all_neg_zero_ = false;
    deposit((bits >> 63) != 0, (bits & ((std::uint64_t{1} << 52) - 1)) | (std::uint64_t{1} << 52),
            static_cast<int>(field) - 1);
  }
  void add(const ExactSum& other);

  /// Correctly rounded value of the exact sum. NaN if any input was NaN or
  /// infinities of both signs were added; an infinity if only one sign was
  /// seen; -0.0 only if every input was -0.0.
  double to_double() const;

  bool empty() const { return count_ == 0; }

 private:
  static constexpr int kChunks = 68;  // covers 2^-1074 .. 2^1101 with carry room
  static constexpr std::int64_t kPendingLimit = std::int64_t{1} << 30;

  void normalize() const;
  void add_slow(double x);

  // Adds or subtracts mant * 2^(pos - 1074).
  void deposit(bool negative, std::uint64_t mant, int pos) {
    __extension__ using u128 = unsigned __int128;
    const int c = pos >> 5;
    const u128 wide = static_cast<u128>(mant) << (pos & 31);
    const std::int64_t sign = negative ? -1 : 0;
    const auto lo = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide) & 0xffffffffu);
    const auto mid = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide) >> 32);
    const auto hi = static_cast<std::int64_t>(static_cast<std::uint64_t>(wide >> 64));
    chunk_[static_cast<std::size_t>(c)] += (lo ^ sign) - sign;
    chunk_[static_cast<std::size_t>(c + 1)] += (mid ^ sign) - sign;
    chunk_[static_cast<std::size_t>(c + 2)] += (hi ^ sign) - sign;
    touch(c, c + 2);
    if (++pending_ >= kPendingLimit) normalize();
  }
  void touch(int lo, int hi) {
    if (lo < lo_) lo_ = lo;
    if (hi > hi_) hi_ = hi;
  }

  mutable std::array<std::int64_t, kChunks> chunk_;
  mutable int lo_ = kChunks;
  mutable int hi_ = -1;
  mutable std::int64_t pending_ = 0;  // unnormalized deposits since last carry pass
  std::uint64_t count_ = 0;
  bool nan_ = false;
  bool pos_inf_ = false;
  bool neg_inf_ = false;
  bool all_neg_zero_ = true;
};

}  // namespace treesum::sim
