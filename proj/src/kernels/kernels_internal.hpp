#pragma once

#include "radvel/kernels.hpp"

namespace radvel::kernels::detail {

// Defined in scalar.cpp / avx2.cpp / neon.cpp. The vectorized variants are
// only linked in when the build enables them.
const KernelTable& scalar_kernels() noexcept;
#if defined(RADVEL_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(RADVEL_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace radvel::kernels::detail
