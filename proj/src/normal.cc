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

#include "lure/normal.h"

#include <cmath>
#include <numbers>

namespace lure {
namespace {

// sqrt(2) - (double)sqrt(2).
constexpr double kSqrt2Lo = -9.667293313452913e-17;

}  // namespace

double NormalCdf(double x) {
  // erfc's relative sensitivity to its argument grows like 2t, so the
  // rounding of -x/sqrt(2) is corrected to first order.
  const double t = -x / std::numbers::sqrt2;
  const double residual = std::fma(-t, std::numbers::sqrt2, -x) - t * kSqrt2Lo;
  const double delta = residual / std::numbers::sqrt2;
  const double slope = std::numbers::inv_sqrtpi * 2.0 * std::exp(-t * t);
  return 0.5 * (std::erfc(t) - delta * slope);
}

}  // namespace lure
