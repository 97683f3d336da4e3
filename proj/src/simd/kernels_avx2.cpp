#include <immintrin.h>

#include "kernels_internal.hpp"

namespace ssvc::simd::detail {

namespace {

std::uint32_t sad_avx2(const std::uint8_t* a, std::ptrdiff_t a_stride,
                       const std::uint8_t* b, std::ptrdiff_t b_stride, int w,
                       int h) {
  __m256i acc = _mm256_setzero_si256();
  std::uint32_t tail = 0;
  for (int y = 0; y < h; ++y) {
    int x = 0;
    for (; x + 32 <= w; x += 32) {
      const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + x));
      const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + x));
      acc = _mm256_add_epi64(acc, _mm256_sad_epu8(va, vb));
    }
    for (; x + 8 <= w; x += 8) {
      const __m128i va = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(a + x));
      const __m128i vb = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b + x));
      acc = _mm256_add_epi64(acc, _mm256_castsi128_si256(_mm_sad_epu8(va, vb)));
    }
    for (; x < w; ++x) {
      const int d = int{a[x]} - int{b[x]};
      tail += static_cast<std::uint32_t>(d < 0 ? -d : d);
    }
    a += a_stride;
    b += b_stride;
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  return static_cast<std::uint32_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]) + tail;
}

std::uint64_t sse_avx2(const std::uint8_t* a, const std::uint8_t* b,
                       std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  // 16 samples per step; madd of 16-bit differences yields 32-bit partial
  // sums of at most 2 * 255^2, widened to 64 bits every step.
  for (; i + 16 <= n; i += 16) {
    const __m256i va = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i)));
    const __m256i vb = _mm256_cvtepu8_epi16(_mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i)));
    const __m256i d = _mm256_sub_epi16(va, vb);
    const __m256i sq = _mm256_madd_epi16(d, d);
    acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_castsi256_si128(sq)));
    acc = _mm256_add_epi64(acc, _mm256_cvtepu32_epi64(_mm256_extracti128_si256(sq, 1)));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t sum = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i) {
    const int d = int{a[i]} - int{b[i]};
    sum += static_cast<std::uint64_t>(d * d);
  }
  return sum;
}

void matmul_avx2(const double* lhs, const double* rhs, double* out, int n) {
  if (n % 4 != 0) {
    kScalarTable.matmul(lhs, rhs, out, n);
    return;
  }
  // Vectorised across four adjacent outputs of a row; each lane sees the same
  // k-ordered mul-then-add sequence as the scalar loop.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; j += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (int k = 0; k < n; ++k) {
        const __m256d l = _mm256_set1_pd(lhs[i * n + k]);
        const __m256d r = _mm256_loadu_pd(rhs + k * n + j);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(l, r));
      }
      _mm256_storeu_pd(out + i * n + j, acc);
    }
  }
}

}  // namespace

const KernelTable kAvx2Table{"avx2", sad_avx2, sse_avx2, matmul_avx2};

}  // namespace ssvc::simd::detail
