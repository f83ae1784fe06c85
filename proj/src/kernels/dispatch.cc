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

#include <cstdlib>
#include <string_view>

#include "lure/errors.h"
#include "lure/kernels/kernels.h"

namespace lure::kernels {

#if !defined(LURE_HAVE_AVX2)
const KernelTable* Avx2Kernels() { return nullptr; }
#endif

bool CpuHasAvx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

namespace {

const KernelTable& Select() {
  const char* forced = std::getenv("LURE_KERNELS");
  const std::string_view choice = forced ? forced : "";
  if (choice == "scalar") return ScalarKernels();
  const KernelTable* avx2 = Avx2Kernels();
  if (choice == "avx2") {
    if (!avx2 || !CpuHasAvx2()) {
      throw ConfigError("LURE_KERNELS=avx2 but AVX2 is unavailable");
    }
    return *avx2;
  }
  if (!choice.empty()) {
    throw ConfigError("LURE_KERNELS must be 'scalar' or 'avx2'");
  }
  return (avx2 && CpuHasAvx2()) ? *avx2 : ScalarKernels();
}

std::uint64_t SplitMix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

const KernelTable& ActiveKernels() {
  static const KernelTable& active = Select();
  return active;
}

RngState SeedRng(std::uint64_t key) {
  RngState rng;
  std::uint64_t x = key;
  for (auto& word : rng.word) {
    for (auto& lane : word) lane = SplitMix(x);
  }
  return rng;
}

std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                        std::uint64_t c) {
  std::uint64_t x = seed;
  std::uint64_t key = SplitMix(x);
  for (std::uint64_t part : {a, b, c}) {
    x = key ^ (part * 0xd6e8feb86659fd93ULL);
    key = SplitMix(x);
  }
  return key;
}

}  // namespace lure::kernels
