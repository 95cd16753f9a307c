#pragma once

#include "fairalloc/kernels.hpp"

namespace fairalloc::kernels::detail {

extern const KernelTable kScalarTable;

#if defined(FAIRALLOC_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

#if defined(FAIRALLOC_HAVE_NEON)
extern const KernelTable kNeonTable;
#endif

}  // namespace fairalloc::kernels::detail
