#include <cstdlib>

#include "kernels_internal.hpp"

namespace ssvc::simd::detail {

namespace {

std::uint32_t sad_scalar(const std::uint8_t* a, std::ptrdiff_t a_stride,
                         const std::uint8_t* b, std::ptrdiff_t b_stride, int w,
                         int h) {
  std::uint32_t sum = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      sum += static_cast<std::uint32_t>(std::abs(int{a[x]} - int{b[x]}));
    }
    a += a_stride;
    b += b_stride;
  }
  return sum;
}

std::uint64_t sse_scalar(const std::uint8_t* a, const std::uint8_t* b,
                         std::size_t n) {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int d = int{a[i]} - int{b[i]};
    sum += static_cast<std::uint64_t>(d * d);
  }
  return sum;
}

void matmul_scalar(const double* lhs, const double* rhs, double* out, int n) {
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += lhs[i * n + k] * rhs[k * n + j];
      out[i * n + j] = acc;
    }
  }
}

}  // namespace

const KernelTable kScalarTable{"scalar", sad_scalar, sse_scalar, matmul_scalar};

}  // namespace ssvc::simd::detail
