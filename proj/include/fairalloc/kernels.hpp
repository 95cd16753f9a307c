#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

// Dense double-precision inner loops used by the solvers and the metrics.
// Every kernel has a scalar reference implementation; SIMD variants (AVX2+FMA
// on x86-64, NEON on aarch64) are chosen once at startup from CPUID. Setting
// FAIRALLOC_KERNELS=scalar in the environment forces the reference path.

namespace fairalloc::kernels {

struct KernelTable {
  const char* name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// sum_i a[i] * b[i] * c[i]
  double (*dot3)(const double* a, const double* b, const double* c, std::size_t n);
  /// max_i |a[i] - b[i]|, 0 for n == 0
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  /// sum_i |a[i] - b[i]|
  double (*sum_abs_diff)(const double* a, const double* b, std::size_t n);
  /// max_i a[i], -inf for n == 0
  double (*max_value)(const double* a, std::size_t n);
  /// out[k] = sum_r m[r * cols + k]
  void (*column_sums)(const double* m, std::size_t rows, std::size_t cols, double* out);
  /// b[i] = a[i] * b[i] * c[i] * s
  void (*scale3)(const double* a, double* b, const double* c, double s, std::size_t n);
};

/// Portable reference kernels.
const KernelTable& scalar();
/// AVX2+FMA kernels, or nullptr when not compiled in or not supported by this CPU.
const KernelTable* avx2();
/// NEON kernels, or nullptr when not compiled in.
const KernelTable* neon();

/// The table selected for this process.
const KernelTable& active();

/// Every table usable on this machine, reference first.
std::vector<const KernelTable*> available();

}  // namespace fairalloc::kernels
