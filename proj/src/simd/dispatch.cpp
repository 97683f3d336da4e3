#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_internal.hpp"

namespace ssvc::simd {

namespace {

bool cpu_has_avx2() {
#if defined(SSVC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("SSVC_SIMD");
  if (env != nullptr && std::strcmp(env, "scalar") == 0) {
    return &detail::kScalarTable;
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &detail::kScalarTable;
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable& scalar_kernels() { return detail::kScalarTable; }

const KernelTable* avx2_kernels() {
#if defined(SSVC_HAVE_AVX2)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& kernels() { return *active().load(std::memory_order_relaxed); }

bool select_isa(Isa isa) {
  const KernelTable* t = isa == Isa::avx2 ? avx2_kernels() : &scalar_kernels();
  if (t == nullptr) return false;
  active().store(t, std::memory_order_relaxed);
  return true;
}

}  // namespace ssvc::simd
