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

#include "engn/fixed32.hpp"

#include <cmath>
#include <ostream>

namespace engn {

Fixed32 Fixed32::from_double(double value) {
  if (std::isnan(value)) return Fixed32{};
  const double scaled = value * static_cast<double>(kOne);
  if (scaled >= static_cast<double>(std::numeric_limits<std::int32_t>::max())) return max();
  if (scaled <= static_cast<double>(std::numeric_limits<std::int32_t>::min())) return lowest();
  // nearbyint honours the default FE_TONEAREST mode: ties to even.
  return from_raw(static_cast<std::int32_t>(std::nearbyint(scaled)));
}

namespace {

// Round-half-even integer division of a wide numerator.
__int128 divide_nearest_even(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  __int128 q = num / den;
  __int128 r = num % den;
  if (r < 0) {  // normalise to floor division
    q -= 1;
    r += den;
  }
  const __int128 twice = 2 * r;
  if (twice > den || (twice == den && (q & 1) != 0)) q += 1;
  return q;
}

}  // namespace

Fixed32 operator/(Fixed32 a, Fixed32 b) {
  if (b.raw_ == 0) {
    if (a.raw_ == 0) return Fixed32{};
    return a.raw_ > 0 ? Fixed32::max() : Fixed32::lowest();
  }
  const __int128 num = static_cast<__int128>(a.raw_) << Fixed32::kFracBits;
  return Fixed32::from_raw(Fixed32::saturate_wide(divide_nearest_even(num, b.raw_)));
}

Fixed32 operator/(Fixed32 a, std::int64_t divisor) {
  if (divisor == 0) {
    if (a.raw_ == 0) return Fixed32{};
    return a.raw_ > 0 ? Fixed32::max() : Fixed32::lowest();
  }
  return Fixed32::from_raw(Fixed32::saturate_wide(divide_nearest_even(a.raw_, divisor)));
}

std::ostream& operator<<(std::ostream& os, Fixed32 f) { return os << f.to_double(); }

}  // namespace engn
