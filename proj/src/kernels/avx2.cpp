// Compiled with -mavx2 -mfma. Only reached after a CPUID check, so nothing in
// this file may be inlined into portable code: no standard-library templates.

#include <immintrin.h>

#include "kernel_impls.hpp"

namespace fairalloc::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d vabs(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

inline double sabs(double x) { return x < 0.0 ? -x : x; }

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  __m256d m = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    m = _mm256_max_pd(m, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  double r = hmax(m);
  for (; i < n; ++i) {
    const double d = sabs(a[i] - b[i]);
    if (d > r) r = d;
  }
  return r;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, vabs(_mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i))));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += sabs(a[i] - b[i]);
  return s;
}

double max_value(const double* a, std::size_t n) {
  const double neg_inf = -__builtin_inf();
  if (n < 4) {
    double r = neg_inf;
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] > r) r = a[i];
    }
    return r;
  }
  __m256d m = _mm256_loadu_pd(a);
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(a + i));
  double r = hmax(m);
  for (; i < n; ++i) {
    if (a[i] > r) r = a[i];
  }
  return r;
}

void column_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= cols; k += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t r = 0; r < rows; ++r) acc = _mm256_add_pd(acc, _mm256_loadu_pd(m + r * cols + k));
    _mm256_storeu_pd(out + k, acc);
  }
  for (; k < cols; ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += m[r * cols + k];
    out[k] = s;
  }
}

void scale3(const double* a, double* b, const double* c, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(b + i, _mm256_mul_pd(_mm256_mul_pd(ab, _mm256_loadu_pd(c + i)), vs));
  }
  for (; i < n; ++i) b[i] = a[i] * b[i] * c[i] * s;
}

}  // namespace

extern const KernelTable kAvx2Table{
    "avx2", dot, dot3, max_abs_diff, sum_abs_diff, max_value, column_sums, scale3,
};

}  // namespace fairalloc::kernels::detail
