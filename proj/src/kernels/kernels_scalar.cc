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

#include <bit>
#include <cmath>

#include "kernel_constants.h"
#include "lure/kernels/kernels.h"

namespace lure::kernels {
namespace {

using namespace detail;

std::uint64_t NextLane(RngState& rng, std::size_t lane) {
  std::uint64_t& s0 = rng.word[0][lane];
  std::uint64_t& s1 = rng.word[1][lane];
  std::uint64_t& s2 = rng.word[2][lane];
  std::uint64_t& s3 = rng.word[3][lane];
  const std::uint64_t result = Rotl(s0 + s3, 23) + s0;
  const std::uint64_t t = s1 << 17;
  s2 ^= s0;
  s3 ^= s1;
  s1 ^= s2;
  s0 ^= s3;
  s2 ^= t;
  s3 = Rotl(s3, 45);
  return result;
}

void GaussianBlock(RngState& rng, double* block) {
  double u1[kLanes], u2[kLanes];
  for (std::size_t l = 0; l < kLanes; ++l) {
    u1[l] = (static_cast<double>(NextLane(rng, l) >> 12) + 1.0) * kTwoPow52Inv;
  }
  for (std::size_t l = 0; l < kLanes; ++l) {
    u2[l] = static_cast<double>(NextLane(rng, l) >> 12) * kTwoPow52Inv;
  }
  for (std::size_t l = 0; l < kLanes; ++l) {
    const double radius = std::sqrt(LogPositive(u1[l]) * -2.0);
    double s, c;
    SinCos2Pi(u2[l], &s, &c);
    block[l] = radius * c;
    block[kLanes + l] = radius * s;
  }
}

void FillGaussianScalar(RngState& rng, double* out, std::size_t n) {
  constexpr std::size_t kBlock = 2 * kLanes;
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) GaussianBlock(rng, out + i);
  if (i < n) {
    double block[kBlock];
    GaussianBlock(rng, block);
    for (std::size_t k = 0; i < n; ++i, ++k) out[i] = block[k];
  }
}

void FillUniformScalar(RngState& rng, double* out, std::size_t n) {
  double block[kLanes];
  for (std::size_t i = 0; i < n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      block[l] = static_cast<double>(NextLane(rng, l) >> 12) * kTwoPow52Inv;
    }
    for (std::size_t l = 0; l < kLanes && i + l < n; ++l) out[i + l] = block[l];
  }
}

void AxpyScalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

// Lane l accumulates elements i with i % 4 == l; lanes are combined as
// (l0 + l1) + (l2 + l3).
double DotScalar(const double* x, const double* y, std::size_t n) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc[i % kLanes] = acc[i % kLanes] + x[i] * y[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double SquaredNormScalar(const double* x, std::size_t n) {
  return DotScalar(x, x, n);
}

}  // namespace

double LogPositive(double x) {
  const auto bits = std::bit_cast<std::uint64_t>(x);
  double exponent = static_cast<double>(static_cast<std::int64_t>(bits >> 52) - 1023);
  double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) |
                                   0x3ff0000000000000ULL);
  if (m > kSqrt2) {
    m = m * 0.5;
    exponent = exponent + 1.0;
  }
  const double f = (m - 1.0) / (m + 1.0);
  const double t = f + f;
  const double s = f * f;
  double p = kLogCoef[kLogTerms - 1];
  for (int k = kLogTerms - 2; k >= 0; --k) {
    p = p * s;
    p = p + kLogCoef[k];
  }
  double tail = t * s;
  tail = tail * p;
  tail = tail + exponent * kLn2Lo;
  const double r = t + tail;
  return exponent * kLn2Hi + r;
}

void SinCos2Pi(double u, double* s, double* c) {
  const double q = std::nearbyint(u * 4.0);
  const double w = u - q * 0.25;
  const double x = w * kTwoPi;
  const double x2 = x * x;

  double sp = kSinCoef[kSinTerms - 1];
  for (int k = kSinTerms - 2; k >= 0; --k) {
    sp = sp * x2;
    sp = sp + kSinCoef[k];
  }
  double sn = x * x2;
  sn = sn * sp;
  sn = x + sn;

  double cp = kCosCoef[kCosTerms - 1];
  for (int k = kCosTerms - 2; k >= 0; --k) {
    cp = cp * x2;
    cp = cp + kCosCoef[k];
  }
  double cs = x2 * cp;
  cs = 1.0 + cs;

  switch (static_cast<int>(q) & 3) {
    case 0: *s = sn; *c = cs; break;
    case 1: *s = cs; *c = -sn; break;
    case 2: *s = -sn; *c = -cs; break;
    default: *s = -cs; *c = sn; break;
  }
}

const KernelTable& ScalarKernels() {
  static const KernelTable table{"scalar", FillGaussianScalar, FillUniformScalar,
                                 AxpyScalar, DotScalar, SquaredNormScalar};
  return table;
}

}  // namespace lure::kernels
