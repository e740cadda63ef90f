// Copyright 2026 The engn-sim Authors
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

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>

#include <Eigen/Core>

namespace engn {

/// Signed Q16.16 fixed point: 16 integer bits, 16 fractional bits.
///
/// Every arithmetic result saturates to [-2^15, 2^15 - 2^-16]. Products and
/// quotients are computed exactly in a wider type and rounded to nearest,
/// ties to even, before saturation.
class Fixed32 {
 public:
  static constexpr int kFracBits = 16;
  static constexpr std::int64_t kOne = std::int64_t{1} << kFracBits;

  constexpr Fixed32() = default;
  /// Integer value (not a raw bit pattern); saturates.
  explicit constexpr Fixed32(int value) : raw_(saturate(std::int64_t{value} * kOne)) {}

  static constexpr Fixed32 from_raw(std::int32_t raw) {
    Fixed32 f;
    f.raw_ = raw;
    return f;
  }
  static Fixed32 from_double(double value);

  constexpr std::int32_t raw() const { return raw_; }
  constexpr double to_double() const { return static_cast<double>(raw_) / static_cast<double>(kOne); }
  explicit constexpr operator double() const { return to_double(); }

  static constexpr Fixed32 max() { return from_raw(std::numeric_limits<std::int32_t>::max()); }
  static constexpr Fixed32 lowest() { return from_raw(std::numeric_limits<std::int32_t>::min()); }
  static constexpr Fixed32 epsilon() { return from_raw(1); }

  /// Clamp a wide raw value into the representable range.
  static constexpr std::int32_t saturate(std::int64_t wide) {
    if (wide > std::numeric_limits<std::int32_t>::max()) return std::numeric_limits<std::int32_t>::max();
    if (wide < std::numeric_limits<std::int32_t>::min()) return std::numeric_limits<std::int32_t>::min();
    return static_cast<std::int32_t>(wide);
  }

  /// Shift right by `shift` bits, rounding to nearest with ties to even.
  static constexpr __int128 round_shift(__int128 value, int shift) {
    if (shift <= 0) return value;
    const __int128 one = 1;
    const __int128 floor = value >> shift;  // arithmetic shift: floor division
    const __int128 rem = value - (floor << shift);
    const __int128 half = one << (shift - 1);
    if (rem > half || (rem == half && (floor & 1) != 0)) return floor + 1;
    return floor;
  }

  static constexpr std::int32_t saturate_wide(__int128 wide) {
    if (wide > std::numeric_limits<std::int32_t>::max()) return std::numeric_limits<std::int32_t>::max();
    if (wide < std::numeric_limits<std::int32_t>::min()) return std::numeric_limits<std::int32_t>::min();
    return static_cast<std::int32_t>(wide);
  }

  friend constexpr Fixed32 operator+(Fixed32 a, Fixed32 b) {
    return from_raw(saturate(std::int64_t{a.raw_} + b.raw_));
  }
  friend constexpr Fixed32 operator-(Fixed32 a, Fixed32 b) {
    return from_raw(saturate(std::int64_t{a.raw_} - b.raw_));
  }
  friend constexpr Fixed32 operator-(Fixed32 a) { return from_raw(saturate(-std::int64_t{a.raw_})); }
  friend constexpr Fixed32 operator*(Fixed32 a, Fixed32 b) {
    const __int128 product = static_cast<__int128>(a.raw_) * b.raw_;
    return from_raw(saturate_wide(round_shift(product, kFracBits)));
  }
  friend Fixed32 operator/(Fixed32 a, Fixed32 b);
  /// Division by an integer count (mean aggregation).
  friend Fixed32 operator/(Fixed32 a, std::int64_t divisor);

  Fixed32& operator+=(Fixed32 o) { return *this = *this + o; }
  Fixed32& operator-=(Fixed32 o) { return *this = *this - o; }
  Fixed32& operator*=(Fixed32 o) { return *this = *this * o; }
  Fixed32& operator/=(Fixed32 o) { return *this = *this / o; }

  friend constexpr bool operator==(Fixed32, Fixed32) = default;
  friend constexpr auto operator<=>(Fixed32 a, Fixed32 b) { return a.raw_ <=> b.raw_; }

  friend std::ostream& operator<<(std::ostream& os, Fixed32 f);

 private:
  std::int32_t raw_ = 0;
};

// Eigen's cwise max/min and abs hooks.
inline Fixed32 abs(Fixed32 f) { return f.raw() < 0 ? -f : f; }
inline Fixed32 abs2(Fixed32 f) { return f * f; }
inline Fixed32 conj(Fixed32 f) { return f; }
inline Fixed32 real(Fixed32 f) { return f; }
inline Fixed32 imag(Fixed32) { return Fixed32{}; }

}  // namespace engn

namespace Eigen {

template <>
struct NumTraits<engn::Fixed32> : GenericNumTraits<engn::Fixed32> {
  using Real = engn::Fixed32;
  using NonInteger = engn::Fixed32;
  using Literal = engn::Fixed32;
  using Nested = engn::Fixed32;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 1,
    AddCost = 1,
    MulCost = 3
  };
  static inline engn::Fixed32 epsilon() { return engn::Fixed32::epsilon(); }
  static inline engn::Fixed32 dummy_precision() { return engn::Fixed32::from_raw(16); }
  static inline engn::Fixed32 highest() { return engn::Fixed32::max(); }
  static inline engn::Fixed32 lowest() { return engn::Fixed32::lowest(); }
  static inline int digits10() { return 4; }
};

}  // namespace Eigen
