#include <arm_neon.h>

#include "wtrace/kernels.hpp"

namespace wtrace::kernels::detail {

double weighted_sum_neon(const double* w, const double* f, std::size_t m) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(w + i), vld1q_f64(f + i));
  double s = vaddvq_f64(acc);
  for (; i < m; ++i) s += w[i] * f[i];
  return s;
}

double weighted_sum3_neon(const double* a, const double* b, const double* c,
                          std::size_t m) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    float64x2_t ab = vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, ab, vld1q_f64(c + i));
  }
  double s = vaddvq_f64(acc);
  for (; i < m; ++i) s += a[i] * b[i] * c[i];
  return s;
}

double dot_neon(const double* a, const double* b, std::size_t m) {
  return weighted_sum_neon(a, b, m);
}

double norm2_sq_neon(const double* a, std::size_t m) {
  return weighted_sum_neon(a, a, m);
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t m) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2)
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < m; ++i) y[i] += alpha * x[i];
}

void scale_neon(double alpha, double* y, std::size_t m) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2)
    vst1q_f64(y + i, vmulq_f64(va, vld1q_f64(y + i)));
  for (; i < m; ++i) y[i] *= alpha;
}

}  // namespace wtrace::kernels::detail
