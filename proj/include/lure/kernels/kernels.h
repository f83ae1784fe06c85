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

// Data-parallel inner loops of the theory lab. Every kernel has a scalar
// reference and, on x86-64, an AVX2 variant picked at runtime. The scalar
// reference follows the 4-lane evaluation order of the vector code and both
// avoid fused multiply-add, so the two paths agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lure::kernels {

inline constexpr std::size_t kLanes = 4;

// Four interleaved xoshiro256++ generators; word[w][lane].
struct RngState {
  alignas(32) std::uint64_t word[4][kLanes];
};

// Seeds all lanes from one 64-bit key via splitmix64.
RngState SeedRng(std::uint64_t key);

// Mixes a base seed with stream coordinates into a stream key.
std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                        std::uint64_t c = 0);

struct KernelTable {
  std::string_view name;
  // Standard normals by Box-Muller, 8 per block; a partial trailing block
  // still consumes a whole block of state.
  void (*fill_gaussian)(RngState& rng, double* out, std::size_t n);
  // Uniforms in [0, 1) with 52 random bits, 4 per block.
  void (*fill_uniform)(RngState& rng, double* out, std::size_t n);
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*squared_norm)(const double* x, std::size_t n);
};

const KernelTable& ScalarKernels();
// nullptr when the AVX2 variant was not compiled in.
const KernelTable* Avx2Kernels();
bool CpuHasAvx2();

// AVX2 when the CPU supports it, else scalar. LURE_KERNELS=scalar|avx2 in
// the environment forces a choice.
const KernelTable& ActiveKernels();

// Scalar math shared by the reference kernels; exposed for tests.
double LogPositive(double x);
void SinCos2Pi(double u, double* s, double* c);

// Convenience wrappers over the active table.
inline void FillGaussian(RngState& rng, std::span<double> out) {
  ActiveKernels().fill_gaussian(rng, out.data(), out.size());
}
inline double Dot(std::span<const double> x, std::span<const double> y) {
  return ActiveKernels().dot(x.data(), y.data(), x.size());
}
inline double SquaredNorm(std::span<const double> x) {
  return ActiveKernels().squared_norm(x.data(), x.size());
}
inline void Axpy(double a, std::span<const double> x, std::span<double> y) {
  ActiveKernels().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace lure::kernels
