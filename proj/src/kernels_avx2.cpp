#include <immintrin.h>

#include "wtrace/kernels.hpp"

namespace wtrace::kernels::detail {

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}
}  // namespace

double weighted_sum_avx2(const double* w, const double* f, std::size_t m) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= m; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i + 4), _mm256_loadu_pd(f + i + 4), acc1);
  }
  for (; i + 4 <= m; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(f + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < m; ++i) acc += w[i] * f[i];
  return acc;
}

double weighted_sum3_avx2(const double* a, const double* b, const double* c,
                          std::size_t m) {
  __m256d acc0 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc0 = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc0);
  }
  double acc = hsum(acc0);
  for (; i < m; ++i) acc += a[i] * b[i] * c[i];
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t m) {
  return weighted_sum_avx2(a, b, m);
}

double norm2_sq_avx2(const double* a, std::size_t m) {
  return weighted_sum_avx2(a, a, m);
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t m) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < m; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* y, std::size_t m) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(y + i)));
  for (; i < m; ++i) y[i] *= alpha;
}

}  // namespace wtrace::kernels::detail
