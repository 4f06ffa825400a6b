#include "wtrace/kernels.hpp"

#include <stdexcept>

namespace wtrace::kernels {

namespace {
Backend g_backend = detect_backend();
}

Backend detect_backend() {
#if defined(WTRACE_BUILD_AVX2)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return Backend::kAvx2;
#endif
#if defined(WTRACE_BUILD_NEON)
  return Backend::kNeon;
#endif
  return Backend::kScalar;
}

Backend active_backend() { return g_backend; }

void set_backend(Backend b) {
  if (b == Backend::kScalar) {
    g_backend = b;
    return;
  }
  if (b != detect_backend())
    throw std::runtime_error("kernels: backend " + backend_name(b) +
                             " not available on this build/CPU");
  g_backend = b;
}

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
    case Backend::kNeon: return "neon";
  }
  return "?";
}

#if defined(WTRACE_BUILD_AVX2)
#define WTRACE_DISPATCH(fn, ...)                                        \
  (g_backend == Backend::kAvx2 ? detail::fn##_avx2(__VA_ARGS__)         \
                               : detail::fn##_scalar(__VA_ARGS__))
#elif defined(WTRACE_BUILD_NEON)
#define WTRACE_DISPATCH(fn, ...)                                        \
  (g_backend == Backend::kNeon ? detail::fn##_neon(__VA_ARGS__)         \
                               : detail::fn##_scalar(__VA_ARGS__))
#else
#define WTRACE_DISPATCH(fn, ...) detail::fn##_scalar(__VA_ARGS__)
#endif

double weighted_sum(std::span<const double> w, std::span<const double> f) {
  if (w.size() != f.size()) throw std::invalid_argument("weighted_sum: size mismatch");
  return WTRACE_DISPATCH(weighted_sum, w.data(), f.data(), w.size());
}

double weighted_sum3(std::span<const double> a, std::span<const double> b,
                     std::span<const double> c) {
  if (a.size() != b.size() || a.size() != c.size())
    throw std::invalid_argument("weighted_sum3: size mismatch");
  return WTRACE_DISPATCH(weighted_sum3, a.data(), b.data(), c.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return WTRACE_DISPATCH(dot, a.data(), b.data(), a.size());
}

double norm2_sq(std::span<const double> a) {
  return WTRACE_DISPATCH(norm2_sq, a.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  WTRACE_DISPATCH(axpy, alpha, x.data(), y.data(), x.size());
}

void scale(double alpha, std::span<double> y) {
  WTRACE_DISPATCH(scale, alpha, y.data(), y.size());
}

#undef WTRACE_DISPATCH

}  // namespace wtrace::kernels
