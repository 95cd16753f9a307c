#include <cstdlib>
#include <string_view>

#include "kernel_impls.hpp"

namespace fairalloc::kernels {

const KernelTable& scalar() { return detail::kScalarTable; }

const KernelTable* avx2() {
#if defined(FAIRALLOC_HAVE_AVX2)
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return supported ? &detail::kAvx2Table : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon() {
#if defined(FAIRALLOC_HAVE_NEON)
  return &detail::kNeonTable;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable* table = [] {
    const char* forced = std::getenv("FAIRALLOC_KERNELS");
    if (forced != nullptr && std::string_view(forced) == "scalar") return &scalar();
    if (const KernelTable* t = avx2()) return t;
    if (const KernelTable* t = neon()) return t;
    return &scalar();
  }();
  return *table;
}

std::vector<const KernelTable*> available() {
  std::vector<const KernelTable*> out{&scalar()};
  if (const KernelTable* t = avx2()) out.push_back(t);
  if (const KernelTable* t = neon()) out.push_back(t);
  return out;
}

}  // namespace fairalloc::kernels
