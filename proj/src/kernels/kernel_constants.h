// Copyright 2026 The lure-toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Constants shared by the scalar and AVX2 kernels. Both must evaluate the
// same expressions in the same order.

#include <cstdint>

namespace lure::kernels::detail {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kTwoPi = 6.28318530717958647692;
inline constexpr double kTwoPow52 = 4503599627370496.0;
inline constexpr double kTwoPow52Inv = 1.0 / kTwoPow52;

// log(m) = t + t*s*P(s) with t = 2(m-1)/(m+1), s = ((m-1)/(m+1))^2,
// P(s) = sum_k s^(k-1) / (2k+1), k = 1..11.
inline constexpr int kLogTerms = 11;
inline constexpr double kLogCoef[kLogTerms] = {
    1.0 / 3,  1.0 / 5,  1.0 / 7,  1.0 / 9,  1.0 / 11, 1.0 / 13,
    1.0 / 15, 1.0 / 17, 1.0 / 19, 1.0 / 21, 1.0 / 23};

inline constexpr double Factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// sin x = x + x*x2*S(x2), S = sum_k (-1)^k x2^(k-1) / (2k+1)!, k = 1..8.
inline constexpr int kSinTerms = 8;
inline constexpr double kSinCoef[kSinTerms] = {
    -1.0 / Factorial(3),  1.0 / Factorial(5),  -1.0 / Factorial(7),
    1.0 / Factorial(9),   -1.0 / Factorial(11), 1.0 / Factorial(13),
    -1.0 / Factorial(15), 1.0 / Factorial(17)};

// cos x = 1 + x2*C(x2), C = sum_k (-1)^k x2^(k-1) / (2k)!, k = 1..9.
inline constexpr int kCosTerms = 9;
inline constexpr double kCosCoef[kCosTerms] = {
    -1.0 / Factorial(2),  1.0 / Factorial(4),  -1.0 / Factorial(6),
    1.0 / Factorial(8),   -1.0 / Factorial(10), 1.0 / Factorial(12),
    -1.0 / Factorial(14), 1.0 / Factorial(16), -1.0 / Factorial(18)};

inline constexpr std::uint64_t Rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace lure::kernels::detail
