#pragma once

#include "wtrace/params.hpp"

namespace wtrace::constants {

// Best constant S(n,sigma) of the half-space weighted trace inequality.
// Evaluated in log-space.
double sharp_constant(const SobolevParams& params);

// kappa_sigma = Gamma(sigma) / (2^{1-2 sigma} Gamma(1-sigma)); kappa_{1/2} = 1.
double kappa(double sigma);

// Bubble amplitude alpha_{n,sigma}: the peak value w_{1,0}(0).
double bubble_amplitude(const SobolevParams& params);

// Extension kernel normalization constant p_{n,sigma}.
double kernel_constant(const SobolevParams& params);

// Ratio of the weighted Dirichlet energy of W_1 to A_0
//   = (n-2)(n-2+2 sigma)(n-2-2 sigma) / (4 sigma (n-1)).
// Requires n > 2 sigma + 2.
double a0_ratio(const SobolevParams& params);

// A_0 = int t^{1-2 sigma} W_1^2 in closed form (energy identity divided by
// a0_ratio). Requires n > 2 sigma + 2.
double a0_closed_form(const SobolevParams& params);

// Full-space weighted Dirichlet energy of W_1:
// kappa^{(n-2s)/(2s)} * S^{-n/(2s)}.
double bubble_energy(const SobolevParams& params);

// int_{R^n} w_1^p dx = (S^{-1} kappa)^{n/(2 sigma)}.
double bubble_boundary_lp(const SobolevParams& params);

// Volume of the unit sphere S^n in R^{n+1}: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_volume(int n);

struct ConstantSet {
  double S;
  double kappa;
  double alpha;
  double pker;
  double A0_ratio;  // NaN when n <= 2 sigma + 2
};

ConstantSet evaluate(const SobolevParams& params);

}  // namespace wtrace::constants
