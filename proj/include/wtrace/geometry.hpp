#pragma once

#include <span>
#include <string>
#include <vector>

#include "wtrace/params.hpp"

namespace wtrace::geometry {

// Symmetric n x n matrix stored dense row-major.
struct SymMatrix {
  int n = 0;
  std::vector<double> a;  // n*n, row-major

  SymMatrix() = default;
  explicit SymMatrix(int n_, double diag = 0.0) : n(n_), a(n_ * n_, 0.0) {
    for (int i = 0; i < n_; ++i) a[i * n_ + i] = diag;
  }
  double& operator()(int i, int j) { return a[i * n + j]; }
  double operator()(int i, int j) const { return a[i * n + j]; }
  double trace() const;
  double frob_sq() const;  // sum of squared entries
  bool is_symmetric(double tol = 1e-12) const;
};

// Pointwise curvature data at a boundary point, orthonormal frame: mean
// curvature H, second fundamental form pi, boundary Ricci / scalar
// curvature, the normal-normal ambient Ricci component Rtt, the mixed
// components Ritjt, the surface gradient of H, and two optional
// higher-order tensors (metric t,m-derivative g^{ij}_{,tm} and the
// boundary Riemann tensor), both defaulting to zero.
struct CurvatureData {
  int n = 0;
  double H = 0.0;
  SymMatrix pi;
  SymMatrix Rbar_ric;
  double Rbar_scalar = 0.0;
  double Rtt = 0.0;
  SymMatrix Ritjt;
  std::vector<double> Hgrad;  // n
  std::vector<double> g_tm;   // n*n*n, [i][j][m] row-major, optional
  std::vector<double> Riem4;  // n^4, [i][k][l][j] row-major, optional

  static CurvatureData zero(int n);

  // Checks symmetry, trace(pi) = H, trace(Rbar_ric) = Rbar_scalar, and the
  // curvature symmetries of Riem4 when supplied; throws on violation.
  void validate(double tol = 1e-12) const;

  double pi_norm_sq() const { return pi.frob_sq(); }
};

struct MetricSample {
  double sqrt_det;
  SymMatrix g_inv;
  int truncation_order;  // order retained in (x,t)
};

// Second-order expansion of sqrt|g| at (x, t):
// 1 - H t + 1/2 (H^2 - |pi|^2 - Rtt) t^2 - H_{,i} x^i t - 1/6 Rbar_{ij} x^i x^j
double sqrt_det_g(const CurvatureData& data, std::span<const double> x, double t);

// Second-order expansion of g^{ij}:
// delta + 2 pi t - 1/3 Riem4^i_{kl}{}^j x^k x^l + g^{ij}_{,tm} x^m t
//       + (3 pi^{im} pi_m{}^j + R^i_t{}^j_t) t^2
SymMatrix g_inverse(const CurvatureData& data, std::span<const double> x, double t);

MetricSample metric_sample(const CurvatureData& data, std::span<const double> x,
                           double t);

// Largest rho such that sqrt_det_g stays positive on a sample of the
// half-ball of radius rho (default search cap 0.5).
double validity_radius(const CurvatureData& data, double cap = 0.5);

// The minimal-energy curvature criterion:
//   (3n^2-6n-4s^2+4) / (12(1-s)(n-1)(n-2-2s)) * Rbar + |pi|^2
//   + (3n-2-2s) / (3n-6-6s) * Rtt
// Positive value means curvature forces the strict energy deficit.
double curvature_condition(const SobolevParams& params, double Rbar_scalar,
                           double pi_norm2, double Rtt);

// JSON (de)serialization; arrays are row-major with shapes n, n x n,
// n x n x n, n^4. Missing optional tensors deserialize to zero.
std::string to_json(const CurvatureData& data);
CurvatureData from_json(const std::string& text);
CurvatureData load_json_file(const std::string& path);

}  // namespace wtrace::geometry
