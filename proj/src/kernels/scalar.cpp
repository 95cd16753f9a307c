#include <cmath>
#include <limits>

#include "kernel_impls.hpp"

namespace fairalloc::kernels::detail {

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double dot3(const double* a, const double* b, const double* c, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

double sum_abs_diff(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double max_value(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > m) m = a[i];
  }
  return m;
}

void column_sums(const double* m, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t k = 0; k < cols; ++k) out[k] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    for (std::size_t k = 0; k < cols; ++k) out[k] += row[k];
  }
}

void scale3(const double* a, double* b, const double* c, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) b[i] = a[i] * b[i] * c[i] * s;
}

}  // namespace

extern const KernelTable kScalarTable{
    "scalar", dot, dot3, max_abs_diff, sum_abs_diff, max_value, column_sums, scale3,
};

}  // namespace fairalloc::kernels::detail
