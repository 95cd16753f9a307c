#include <arm_neon.h>

#include "kernel_impls.hpp"

namespace fairalloc::kernels::detail {

namespace {

inline double sabs(double x) { return x < 0.0 ? -x : x; }

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), vld1q_f64(c + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double d = sabs(a[i] - b[i]);
    if (d > r) r = d;
  }
  return r;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += sabs(a[i] - b[i]);
  return s;
}

double max_value(const double* a, std::size_t n) {
  double r = -__builtin_inf();
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t m = vld1q_f64(a);
    for (i = 2; i + 2 <= n; i += 2) m = vmaxq_f64(m, vld1q_f64(a + i));
    r = vmaxvq_f64(m);
  }
  for (; i < n; ++i) {
    if (a[i] > r) r = a[i];
  }
  return r;
}

void column_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  std::size_t k = 0;
  for (; k + 2 <= cols; k += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t r = 0; r < rows; ++r) acc = vaddq_f64(acc, vld1q_f64(m + r * cols + k));
    vst1q_f64(out + k, acc);
  }
  for (; k < cols; ++k) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += m[r * cols + k];
    out[k] = s;
  }
}

void scale3(const double* a, double* b, const double* c, double s, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t ab = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    vst1q_f64(b + i, vmulq_n_f64(vmulq_f64(ab, vld1q_f64(c + i)), s));
  }
  for (; i < n; ++i) b[i] = a[i] * b[i] * c[i] * s;
}

}  // namespace

extern const KernelTable kNeonTable{
    "neon", dot, dot3, max_abs_diff, sum_abs_diff, max_value, column_sums, scale3,
};

}  // namespace fairalloc::kernels::detail
