#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wtrace/params.hpp"

namespace wtrace::quad {

// Nodes and weights; the weights absorb the full measure, so
// integral ~ sum_i weights[i] * f(nodes[i]).
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double integrate(const std::function<double(double)>& f) const;
};

// Gauss rule on [-1,1] for the Jacobi weight (1-x)^alpha (1+x)^beta.
// Nodes are eigenvalues of the Jacobi matrix (Golub-Welsch); throws if the
// tridiagonal eigensolve fails to converge.
GaussRule jacobi_gauss(double alpha, double beta, int m);

// Gauss rule for the weight t^a on [0, T].
GaussRule power_rule(double a, double T, int m);

// Gauss-Legendre on [lo, hi].
GaussRule legendre_rule(double lo, double hi, int m);

// Geometrically substituted rule for smooth-decaying integrands of
// t^a f(t) on [lo, hi], lo > 0: Gauss-Legendre in log t, measure t^a dt
// absorbed into the weights.
GaussRule log_rule(double a, double lo, double hi, int m);

// Composite rule for int_0^R rho^a f(rho) d rho when f varies on scale
// `scale` near 0 and decays smoothly beyond: power rule on [0, c*scale],
// log rule on [c*scale, R].
GaussRule radial_rule(double a, double scale, double R, int m_inner, int m_outer);

// Angular rule: int_0^1 f(u) u^{1-2 sigma} (1-u^2)^{(n-2)/2} du, the
// polar-angle factor of the weighted half-space measure (u = t/rho).
GaussRule angular_rule(int n, double sigma, int m);

// Spherical-mean rule: int_{-1}^{1} f(c) (1-c^2)^{(n-3)/2} dc.
GaussRule gegenbauer_rule(int n, int m);

// Per the published contract: rule for the weight t^{1-2 sigma} on [0,T].
struct JacobiRule {
  double exponent;  // 1 - 2 sigma
  double T;
  GaussRule rule;
};
JacobiRule jacobi_rule(double sigma, double T, int m);

// Neumaier-compensated sum in index order; bit-reproducible for a given
// input sequence regardless of how the partials were produced.
double deterministic_sum(std::span<const double> partials);

// Evaluate f over `count` indices (possibly on several threads) and reduce
// the per-index values with deterministic_sum.
double parallel_deterministic_sum(std::size_t count,
                                  const std::function<double(std::size_t)>& f,
                                  int threads = 1);

struct IntegralResult {
  double value;
  double tail_bound;
};

// Optional truncation-tail certificate: the integrand's radial profile is
// bounded by C * rho^{-q} beyond the truncation radius, so the neglected
// mass is at most C * int_R^inf rho^{n+1-2 sigma - q} d rho.
struct TailEnvelope {
  double C = 0.0;
  double q = 0.0;
};

// int over {0<t, rho=|(x,t)| <= R} of t^{1-2 sigma} f(r, t) dx dt for
// integrands depending on (|x|, t) only; polar (rho, u) tensor quadrature
// with the surface factor omega_{n-1} included. `scale` is the
// concentration scale of f near the origin.
IntegralResult half_ball_integral_radial(
    const std::function<double(double, double)>& f, const SobolevParams& params,
    double R, double scale, int m_radial, int m_angular,
    TailEnvelope tail = {}, int threads = 1);

// Tensor-product cylinder quadrature {|x_i| <= R}^n x (0, T] for general
// integrands; cost grows as m_x^n, intended for small n cross-checks.
// Signals non-finite integrand samples.
IntegralResult half_space_integral(
    const std::function<double(std::span<const double>, double)>& f,
    const SobolevParams& params, double T, double R, int m_x, int m_t);

}  // namespace wtrace::quad
