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

#include <immintrin.h>

#include "kernel_constants.h"
#include "lure/kernels/kernels.h"

namespace lure::kernels {
namespace {

using namespace detail;

struct Xoshiro4 {
  __m256i s0, s1, s2, s3;

  explicit Xoshiro4(const RngState& rng)
      : s0(Load(rng.word[0])), s1(Load(rng.word[1])),
        s2(Load(rng.word[2])), s3(Load(rng.word[3])) {}

  void Store(RngState& rng) const {
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.word[0]), s0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.word[1]), s1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.word[2]), s2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(rng.word[3]), s3);
  }

  static __m256i Load(const std::uint64_t* p) {
    return _mm256_load_si256(reinterpret_cast<const __m256i*>(p));
  }

  template <int k>
  static __m256i Rotl(__m256i x) {
    return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
  }

  __m256i Next() {
    const __m256i result = _mm256_add_epi64(Rotl<23>(_mm256_add_epi64(s0, s3)), s0);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = Rotl<45>(s3);
    return result;
  }
};

// Exact conversion of integers below 2^52.
inline __m256d SmallIntToDouble(__m256i v) {
  const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d magic = _mm256_set1_pd(kTwoPow52);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic_bits)), magic);
}

inline __m256d Uniform(__m256i raw) {
  return _mm256_mul_pd(SmallIntToDouble(_mm256_srli_epi64(raw, 12)),
                       _mm256_set1_pd(kTwoPow52Inv));
}

inline __m256d LogPositive4(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  __m256d exponent = _mm256_sub_pd(SmallIntToDouble(_mm256_srli_epi64(bits, 52)),
                                   _mm256_set1_pd(1023.0));
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(
      _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL)),
      _mm256_set1_epi64x(0x3ff0000000000000LL)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  exponent = _mm256_blendv_pd(
      exponent, _mm256_add_pd(exponent, _mm256_set1_pd(1.0)), big);

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_div_pd(_mm256_sub_pd(m, one), _mm256_add_pd(m, one));
  const __m256d t = _mm256_add_pd(f, f);
  const __m256d s = _mm256_mul_pd(f, f);
  __m256d p = _mm256_set1_pd(kLogCoef[kLogTerms - 1]);
  for (int k = kLogTerms - 2; k >= 0; --k) {
    p = _mm256_mul_pd(p, s);
    p = _mm256_add_pd(p, _mm256_set1_pd(kLogCoef[k]));
  }
  __m256d tail = _mm256_mul_pd(t, s);
  tail = _mm256_mul_pd(tail, p);
  tail = _mm256_add_pd(tail, _mm256_mul_pd(exponent, _mm256_set1_pd(kLn2Lo)));
  const __m256d r = _mm256_add_pd(t, tail);
  return _mm256_add_pd(_mm256_mul_pd(exponent, _mm256_set1_pd(kLn2Hi)), r);
}

inline void SinCos2Pi4(__m256d u, __m256d* s, __m256d* c) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(u, _mm256_set1_pd(4.0)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d w = _mm256_sub_pd(u, _mm256_mul_pd(q, _mm256_set1_pd(0.25)));
  const __m256d x = _mm256_mul_pd(w, _mm256_set1_pd(kTwoPi));
  const __m256d x2 = _mm256_mul_pd(x, x);

  __m256d sp = _mm256_set1_pd(kSinCoef[kSinTerms - 1]);
  for (int k = kSinTerms - 2; k >= 0; --k) {
    sp = _mm256_mul_pd(sp, x2);
    sp = _mm256_add_pd(sp, _mm256_set1_pd(kSinCoef[k]));
  }
  __m256d sn = _mm256_mul_pd(x, x2);
  sn = _mm256_mul_pd(sn, sp);
  sn = _mm256_add_pd(x, sn);

  __m256d cp = _mm256_set1_pd(kCosCoef[kCosTerms - 1]);
  for (int k = kCosTerms - 2; k >= 0; --k) {
    cp = _mm256_mul_pd(cp, x2);
    cp = _mm256_add_pd(cp, _mm256_set1_pd(kCosCoef[k]));
  }
  __m256d cs = _mm256_mul_pd(x2, cp);
  cs = _mm256_add_pd(_mm256_set1_pd(1.0), cs);

  const __m256d is1 = _mm256_cmp_pd(q, _mm256_set1_pd(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(q, _mm256_set1_pd(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(q, _mm256_set1_pd(3.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is1, is3);
  const __m256d sign = _mm256_set1_pd(-0.0);
  const __m256d s_sel = _mm256_blendv_pd(sn, cs, swap);
  const __m256d c_sel = _mm256_blendv_pd(cs, sn, swap);
  *s = _mm256_xor_pd(s_sel, _mm256_and_pd(_mm256_or_pd(is2, is3), sign));
  *c = _mm256_xor_pd(c_sel, _mm256_and_pd(_mm256_or_pd(is1, is2), sign));
}

inline void GaussianBlock(Xoshiro4& gen, double* out) {
  const __m256d u1 = _mm256_mul_pd(
      _mm256_add_pd(SmallIntToDouble(_mm256_srli_epi64(gen.Next(), 12)),
                    _mm256_set1_pd(1.0)),
      _mm256_set1_pd(kTwoPow52Inv));
  const __m256d u2 = Uniform(gen.Next());
  const __m256d radius =
      _mm256_sqrt_pd(_mm256_mul_pd(LogPositive4(u1), _mm256_set1_pd(-2.0)));
  __m256d s, c;
  SinCos2Pi4(u2, &s, &c);
  _mm256_storeu_pd(out, _mm256_mul_pd(radius, c));
  _mm256_storeu_pd(out + kLanes, _mm256_mul_pd(radius, s));
}

void FillGaussianAvx2(RngState& rng, double* out, std::size_t n) {
  constexpr std::size_t kBlock = 2 * kLanes;
  Xoshiro4 gen(rng);
  std::size_t i = 0;
  for (; i + kBlock <= n; i += kBlock) GaussianBlock(gen, out + i);
  if (i < n) {
    double block[kBlock];
    GaussianBlock(gen, block);
    for (std::size_t k = 0; i < n; ++i, ++k) out[i] = block[k];
  }
  gen.Store(rng);
}

void FillUniformAvx2(RngState& rng, double* out, std::size_t n) {
  Xoshiro4 gen(rng);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, Uniform(gen.Next()));
  if (i < n) {
    double block[kLanes];
    _mm256_storeu_pd(block, Uniform(gen.Next()));
    for (std::size_t k = 0; i < n; ++i, ++k) out[i] = block[k];
  }
  gen.Store(rng);
}

void AxpyAvx2(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

double DotAvx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  for (std::size_t l = 0; i < n; ++i, ++l) lanes[l] = lanes[l] + x[i] * y[i];
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double SquaredNormAvx2(const double* x, std::size_t n) { return DotAvx2(x, x, n); }

}  // namespace

const KernelTable* Avx2Kernels() {
  static const KernelTable table{"avx2", FillGaussianAvx2, FillUniformAvx2,
                                 AxpyAvx2, DotAvx2, SquaredNormAvx2};
  return &table;
}

}  // namespace lure::kernels
