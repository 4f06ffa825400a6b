#pragma once

#include <span>
#include <vector>

#include "wtrace/bubble.hpp"
#include "wtrace/geometry.hpp"
#include "wtrace/params.hpp"

namespace wtrace::asymptotics {

// Radial cutoff: 1 on [0, delta], 0 on [2 delta, inf), quintic smoothstep
// (C^2) in between, monotone nonincreasing.
struct CutoffSpec {
  double delta = 0.25;

  explicit CutoffSpec(double d = 0.25) : delta(d) {
    if (d <= 0.0) throw std::invalid_argument("CutoffSpec: delta > 0 required");
  }
  double value(double rho) const;
  double deriv(double rho) const;
};

struct SweepRules {
  double V_ext = -1.0;  // exterior boundary volume; <= 0 means 10 * |B_{2 delta}|
  int m_radial = 48;    // nodes per radial piece (energy integrals)
  int m_angular = 32;
  int m_boundary = 64;  // nodes per radial piece (boundary integrals)
  double mu_rel_tol = 1e-12;
  bubble::ExtensionOptions ext;
};

struct ExpansionCoefficients {
  double K1, K2, K3, K1bar;
};

// Closed-form second-order energy coefficients; requires n > 2 sigma + 2.
ExpansionCoefficients expansion_coefficients(const SobolevParams& params);

// Contraction of a stored curvature tensor T[i][k][l][j] with the isotropic
// fourth-moment tensor delta_ij delta_kl + delta_ik delta_jl + delta_il
// delta_jk; vanishes identically for tensors with curvature symmetries.
double riem4_moment_contraction(std::span<const double> riem4, int n);

struct SweepRow {
  double eps;
  double mu_eps;
  double I1;
  double I2;
  double boundary_lp;
  double quotient;
};

// Concentration model: half-ball B^+_delta carrying the second-order metric
// expansion of the curvature data, annulus B^+_{2 delta} \ B^+_delta where
// the cutoff decays (flat metric; the difference is higher order), and an
// exterior region of boundary volume V_ext where the test function is the
// constant -mu_eps. The test function is eta * W_eps - mu_eps with mu_eps
// solving the zero signed-mean boundary constraint.
class Model {
 public:
  Model(const SobolevParams& params, geometry::CurvatureData data,
        CutoffSpec cutoff = CutoffSpec(), SweepRules rules = {});

  // Unique root of the strictly decreasing constraint map
  // mu -> int |eta w_eps - mu|^{p-2}(eta w_eps - mu) ds_g - V_ext mu^{p-1}.
  double solve_mu(double eps) const;

  // int_{boundary model} |eta w_eps - mu|^p ds_g + V_ext mu^p.
  double boundary_lp(double eps, double mu) const;

  // Weighted Dirichlet energy of W_eps on B^+_delta with metric density and
  // inverse metric averaged exactly over boundary directions (the bubble is
  // radial in x, so the angular integral is a moment computation).
  double energy_I1(double eps) const;

  // Flat annulus energy of eta * W_eps.
  double energy_I2(double eps) const;

  // Flat moment int_{B^+_delta} t^{1-2s} |(x,t)|^k |grad W_eps|^2.
  double gradient_moment(double eps, int k) const;

  // mu solve + energies + quotient (I1+I2) / boundary_lp^{2/p}.
  SweepRow evaluate(double eps) const;

  std::vector<SweepRow> sweep(std::span<const double> eps_values) const;

  double exterior_volume() const { return vext_; }
  const SobolevParams& params() const { return params_; }
  const CutoffSpec& cutoff() const { return cutoff_; }

 private:
  bubble::RadialExtensionValue bubble_at(double eps, double r, double t) const;
  double density_avg(double r, double t) const;   // <sqrt|g|> over directions
  double metric_avg(double r, double t) const;    // <g^{theta theta} sqrt|g|>

  SobolevParams params_;
  geometry::CurvatureData data_;
  CutoffSpec cutoff_;
  SweepRules rules_;
  bubble::SigmaExtension ext_;
  double vext_;
  double pinorm2_, tr_ritjt_, csym_;
};

// Least-squares slope of log(val) vs log(eps) restricted to the
// `use_smallest` smallest eps values.
double fit_loglog_slope(std::span<const double> eps, std::span<const double> vals,
                        int use_smallest = 3);

// Least-squares slope of y vs x restricted to the `use_smallest` smallest x.
double fit_linear_slope(std::span<const double> x, std::span<const double> y,
                        int use_smallest = 3);

// sign(u) |u|^q with a 1e-300 floor (q non-integer, non-Lipschitz at 0).
double signed_power(double u, double q);

}  // namespace wtrace::asymptotics
