#include "wtrace/kernels.hpp"

namespace wtrace::kernels::detail {

double weighted_sum_scalar(const double* w, const double* f, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += w[i] * f[i];
  return acc;
}

double weighted_sum3_scalar(const double* a, const double* b, const double* c,
                            std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += a[i] * b[i] * c[i];
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += a[i] * b[i];
  return acc;
}

double norm2_sq_scalar(const double* a, std::size_t m) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) acc += a[i] * a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* y, std::size_t m) {
  for (std::size_t i = 0; i < m; ++i) y[i] *= alpha;
}

}  // namespace wtrace::kernels::detail
