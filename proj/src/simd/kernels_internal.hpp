#pragma once

#include "ssvc/simd/kernels.hpp"

namespace ssvc::simd::detail {

extern const KernelTable kScalarTable;
#if defined(SSVC_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

}  // namespace ssvc::simd::detail
