// Copyright 2026 The ewahidx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "ewahidx/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace ewahidx::simd {
namespace {

constexpr KernelTable kScalar{Isa::Scalar, scalar::bitwise, scalar::invert,
                              scalar::popcount, scalar::find_clean,
                              scalar::run_length};
#if defined(EWAHIDX_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::bitwise, avx2::invert,
                            avx2::popcount, avx2::find_clean, avx2::run_length};
#endif
#if defined(EWAHIDX_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, neon::bitwise, neon::invert,
                            neon::popcount, neon::find_clean, neon::run_length};
#endif

bool cpu_has_avx2() {
#if defined(EWAHIDX_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* detect() {
  const char* force = std::getenv("EWAHIDX_FORCE_SCALAR");
  if (force != nullptr && std::strcmp(force, "0") != 0) return &kScalar;
#if defined(EWAHIDX_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2;
#endif
#if defined(EWAHIDX_HAVE_NEON)
  return &kNeon;
#endif
  return &kScalar;
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{detect()};
  return current;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return kScalar; }

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
    case Isa::Neon:
#if defined(EWAHIDX_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  switch (isa) {
#if defined(EWAHIDX_HAVE_AVX2)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(EWAHIDX_HAVE_NEON)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() {
  return *slot().load(std::memory_order_relaxed);
}

bool force_isa(Isa isa) {
  if (!isa_supported(isa)) return false;
  slot().store(&kernels_for(isa), std::memory_order_relaxed);
  return true;
}

}  // namespace ewahidx::simd
