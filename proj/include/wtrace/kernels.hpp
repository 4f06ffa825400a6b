#pragma once

#include <cstddef>
#include <span>
#include <string>

// Data-parallel inner loops used by the quadrature and descent code.
// Each operation has a scalar reference implementation and, on x86 with
// AVX2 (or aarch64 with NEON), a vector variant selected at runtime.
// Variants agree with the scalar reference up to reassociation of the
// floating-point sums; equivalence is tested to tight tolerance.
namespace wtrace::kernels {

enum class Backend { kScalar, kAvx2, kNeon };

// Backend chosen at startup from CPU features; override with set_backend
// (throws if the requested backend is not available on this build/CPU).
Backend active_backend();
void set_backend(Backend b);
Backend detect_backend();
std::string backend_name(Backend b);

// sum_i w[i] * f[i]
double weighted_sum(std::span<const double> w, std::span<const double> f);

// sum_i a[i] * b[i] * c[i]  (quadrature with a pointwise density factor)
double weighted_sum3(std::span<const double> a, std::span<const double> b,
                     std::span<const double> c);

double dot(std::span<const double> a, std::span<const double> b);

double norm2_sq(std::span<const double> a);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// y = alpha * y
void scale(double alpha, std::span<double> y);

namespace detail {
double weighted_sum_scalar(const double* w, const double* f, std::size_t m);
double weighted_sum3_scalar(const double* a, const double* b, const double* c,
                            std::size_t m);
double dot_scalar(const double* a, const double* b, std::size_t m);
double norm2_sq_scalar(const double* a, std::size_t m);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t m);
void scale_scalar(double alpha, double* y, std::size_t m);

#if defined(WTRACE_BUILD_AVX2)
double weighted_sum_avx2(const double* w, const double* f, std::size_t m);
double weighted_sum3_avx2(const double* a, const double* b, const double* c,
                          std::size_t m);
double dot_avx2(const double* a, const double* b, std::size_t m);
double norm2_sq_avx2(const double* a, std::size_t m);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t m);
void scale_avx2(double alpha, double* y, std::size_t m);
#endif
#if defined(WTRACE_BUILD_NEON)
double weighted_sum_neon(const double* w, const double* f, std::size_t m);
double weighted_sum3_neon(const double* a, const double* b, const double* c,
                          std::size_t m);
double dot_neon(const double* a, const double* b, std::size_t m);
double norm2_sq_neon(const double* a, std::size_t m);
void axpy_neon(double alpha, const double* x, double* y, std::size_t m);
void scale_neon(double alpha, double* y, std::size_t m);
#endif
}  // namespace detail

}  // namespace wtrace::kernels
