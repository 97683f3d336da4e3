#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference version and,
// where the CPU allows, a vector version chosen once at runtime. Variants are
// required to be bit-identical to the scalar reference: the floating-point
// kernels keep the reference's per-output summation order, so encoder and
// decoder agree no matter which variant either side ran.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace ssvc::simd {

struct KernelTable {
  std::string_view name;

  // Sum of absolute differences over a w x h block of 8-bit samples.
  std::uint32_t (*sad)(const std::uint8_t* a, std::ptrdiff_t a_stride,
                       const std::uint8_t* b, std::ptrdiff_t b_stride, int w,
                       int h);

  // Sum of squared differences over n samples.
  std::uint64_t (*sse)(const std::uint8_t* a, const std::uint8_t* b,
                       std::size_t n);

  // out = lhs * rhs for row-major n x n double matrices. Each output is
  // accumulated as ((0 + l0*r0) + l1*r1) + ... in index order.
  void (*matmul)(const double* lhs, const double* rhs, double* out, int n);
};

enum class Isa { scalar, avx2 };

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();

// The table used by the codec. Defaults to the widest supported variant;
// the environment variable SSVC_SIMD=scalar forces the reference kernels.
const KernelTable& kernels();

// Overrides the runtime choice (tests and benchmarks). Returns false if the
// requested ISA is unavailable, leaving the selection unchanged.
bool select_isa(Isa isa);

}  // namespace ssvc::simd
