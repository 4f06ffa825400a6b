#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wtrace/params.hpp"
#include "wtrace/quadrature.hpp"

namespace wtrace::bubble {

struct BubbleSpec {
  double eps = 1.0;
  std::vector<double> x0;  // empty means the origin

  explicit BubbleSpec(double eps_ = 1.0, std::vector<double> x0_ = {})
      : eps(eps_), x0(std::move(x0_)) {
    if (eps <= 0.0) throw std::invalid_argument("BubbleSpec: eps > 0 required");
  }
};

// Unit-scale boundary profile w_1(s) = alpha (1/(1+s^2))^{(n-2s)/2} and its
// radial derivative.
double w_radial(const SobolevParams& params, double s);
double dw_radial(const SobolevParams& params, double s);

double w(const BubbleSpec& spec, const SobolevParams& params,
         std::span<const double> x);

struct ExtensionValue {
  double value;
  std::vector<double> grad_x;
  double grad_t;
  double quadrature_error_bound;
};

// Radial value/derivative bundle for the unit extension W_1.
struct RadialExtensionValue {
  double value;
  double dr;
  double dt;
  double err_bound;
};

struct ExtensionOptions {
  int m_q = 40;        // nodes per kernel split piece
  int m_angular = 40;  // spherical-mean nodes
  double rel_tol = 1e-4;   // concentration guard threshold
  double abs_tol = 1e-12;
  bool force_quadrature = false;  // bypass the sigma=1/2 closed form
};

// Evaluator for the sigma-harmonic extension of a radial boundary profile
// (default: the bubble w_1). The kernel convolution is evaluated in polar
// coordinates around the evaluation point with the q-integral split at
// radius t; an inner substitution absorbs the t^{2 sigma} concentration and
// an outer algebraic substitution handles the tail. Gradients differentiate
// the kernel (in t) and the spherical mean (in r) analytically.
class SigmaExtension {
 public:
  SigmaExtension(const SobolevParams& params, ExtensionOptions opts = {});

  // Custom radial boundary data f(s), f'(s) (used e.g. for the kernel
  // normalization check with f == 1).
  SigmaExtension(const SobolevParams& params, std::function<double(double)> profile,
                 std::function<double(double)> profile_deriv,
                 ExtensionOptions opts = {});

  // W_1 and gradients at (r, t), t > 0. Throws when the concentration
  // guard detects an unresolved kernel (t far below node resolution).
  RadialExtensionValue eval(double r, double t) const;

  // Always the kernel quadrature (the test oracle at sigma = 1/2).
  RadialExtensionValue eval_quadrature(double r, double t) const;

  const SobolevParams& params() const { return params_; }

 private:
  RadialExtensionValue eval_closed_form(double r, double t) const;

  SobolevParams params_;
  ExtensionOptions opts_;
  std::function<double(double)> profile_;
  std::function<double(double)> profile_deriv_;
  bool bubble_profile_;
  double pker_;
  quad::GaussRule geg_;        // spherical-mean rule
  quad::GaussRule geg_half_;   // coarse variant for the error estimate
  quad::GaussRule inner_;      // tau^{n-1} on [0,1]
  quad::GaussRule inner_half_;
  quad::GaussRule tail_;       // tau^{2 sigma - 1} on [0,1]
  quad::GaussRule tail_half_;
};

// Closed form W_{1,0} at sigma = 1/2 with gradients.
RadialExtensionValue closed_form_half(const SobolevParams& params, double r, double t);

// General (eps, x0) evaluation via the scaling law.
ExtensionValue extend(const BubbleSpec& spec, const SigmaExtension& ext,
                      std::span<const double> x, double t);

struct DecayEnvelope {
  double w_bound;
  double gradx_bound;
  double gradt_bound;
};

// Pointwise decay envelopes (unit constants) bounding W_eps, grad_x W_eps
// and dt W_eps up to a fixed multiplicative constant.
DecayEnvelope decay_envelope(const SobolevParams& params, double eps, double r,
                             double t);

// Largest observed ratio |quantity| / envelope over a sample grid; the
// envelope constants are not pinned analytically, only boundedness is
// asserted.
DecayEnvelope fit_envelope_constants(const SigmaExtension& ext, double r_max,
                                     double t_max, int samples);

}  // namespace wtrace::bubble
