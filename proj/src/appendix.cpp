#include "wtrace/appendix.hpp"

#include <cmath>
#include <stdexcept>

#include "wtrace/constants.hpp"
#include "wtrace/quadrature.hpp"

namespace wtrace::appendix {

const char* identity_name(Identity which) {
  switch (which) {
    case Identity::kX2FullGrad: return "x2_full_grad";
    case Identity::kFullGrad: return "full_grad";
    case Identity::kT3XGrad: return "t3_xgrad";
    case Identity::kT3FullGrad: return "t3_full_grad";
  }
  return "?";
}

double identity_coefficient(Identity which, const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  switch (which) {
    case Identity::kX2FullGrad:
      return n * (n * n - 4.0 * n * (1.0 - s) + 4.0 * (1.0 - s - s * s)) /
             (4.0 * s * (n - 1.0));
    case Identity::kFullGrad:
      return constants::a0_ratio(params);
    case Identity::kT3XGrad:
      return 2.0 * (1.0 - s * s) / 3.0;
    case Identity::kT3FullGrad:
      return 2.0 * (1.0 - s);
  }
  return 0.0;
}

Oracle::Oracle(const SobolevParams& params, OracleOptions opts)
    : params_(params), opts_(opts) {
  const int n = params.n;
  const double sigma = params.sigma;
  if (n <= 2.0 * sigma + 2.0)
    throw std::invalid_argument("appendix::Oracle: requires n > 2 sigma + 2");
  if (opts_.R <= 16.0)
    throw std::invalid_argument("appendix::Oracle: truncation radius too small");

  rad_ = quad::radial_rule(n + 1.0 - 2.0 * sigma, 1.0, opts_.R,
                           opts_.m_radial, opts_.m_radial);
  ang_ = quad::angular_rule(n, sigma, opts_.m_angular);

  bubble::SigmaExtension ext(params, opts_.ext);
  const std::size_t nn = rad_.size() * ang_.size();
  wv_.resize(nn);
  wr_.resize(nn);
  wt_.resize(nn);
  const double m = params.half_order();
  const double rho_fit = 0.25 * opts_.R;
  for (std::size_t i = 0; i < rad_.size(); ++i) {
    const double rho = rad_.nodes[i];
    for (std::size_t j = 0; j < ang_.size(); ++j) {
      const double u = ang_.nodes[j];
      const double r = rho * std::sqrt(1.0 - u * u);
      const double t = rho * u;
      bubble::RadialExtensionValue v = ext.eval(r, t);
      const std::size_t k = i * ang_.size() + j;
      wv_[k] = v.value;
      wr_[k] = v.dr;
      wt_[k] = v.dt;
      if (rho >= rho_fit) {
        // envelope constants: |W| <= cw rho^{-(n-2s)}, |d_r W| <= cx
        // rho^{-(n-2s)-1}, |d_t W| <= ct t^{2s-1} rho^{-n}
        cw_ = std::max(cw_, std::fabs(v.value) * std::pow(rho, 2.0 * m));
        cx_ = std::max(cx_, std::fabs(v.dr) * std::pow(rho, 2.0 * m + 1.0));
        ct_ = std::max(ct_, std::fabs(v.dt) * std::pow(t, 1.0 - 2.0 * sigma) *
                                std::pow(rho, static_cast<double>(n)));
      }
    }
  }
  const double safety = 1.5;
  cw_ *= safety;
  cx_ *= safety;
  ct_ *= safety;

  const double omega = constants::sphere_volume(n - 1);
  std::vector<double> rows(rad_.size());
  for (std::size_t i = 0; i < rad_.size(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < ang_.size(); ++j) {
      const std::size_t k = i * ang_.size() + j;
      acc += ang_.weights[j] * wv_[k] * wv_[k];
    }
    rows[i] = rad_.weights[i] * acc;
  }
  a0_ = omega * quad::deterministic_sum(rows);
  a0_tail_ = tail_integral({{cw_ * cw_, -4.0 * m, 0.0}});
  if (!(a0_ > 0.0) || !std::isfinite(a0_))
    throw std::runtime_error("appendix::Oracle: A0 quadrature not finite positive");
}

double Oracle::tail_integral(const std::vector<Term>& terms) const {
  const int n = params_.n;
  const double sigma = params_.sigma;
  const double omega = constants::sphere_volume(n - 1);
  double tail = 0.0;
  for (const Term& term : terms) {
    const double s = n + 2.0 - 2.0 * sigma + term.e;
    if (s >= 0.0)
      throw std::runtime_error(
          "appendix::Oracle: truncation tail not integrable (divergence)");
    // int_0^1 u^{1-2s+b} (1-u^2)^{(n-2)/2} du
    const double a = 0.5 * (2.0 - 2.0 * sigma + term.b);
    const double angmom =
        0.5 * std::exp(std::lgamma(a) + std::lgamma(0.5 * n) -
                       std::lgamma(a + 0.5 * n));
    tail += omega * term.C * angmom * std::pow(opts_.R, s) / (-s);
  }
  return tail;
}

IdentityReport Oracle::verify(Identity which) const {
  const double m = params_.half_order();
  const double sigma = params_.sigma;
  std::vector<double> rows(rad_.size());
  for (std::size_t i = 0; i < rad_.size(); ++i) {
    const double rho = rad_.nodes[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < ang_.size(); ++j) {
      const double u = ang_.nodes[j];
      const std::size_t k = i * ang_.size() + j;
      const double gx2 = wr_[k] * wr_[k];
      const double g2 = gx2 + wt_[k] * wt_[k];
      double f = 0.0;
      switch (which) {
        case Identity::kX2FullGrad:
          f = rho * rho * (1.0 - u * u) * g2;
          break;
        case Identity::kFullGrad:
          f = g2;
          break;
        case Identity::kT3XGrad:
          f = rho * rho * u * u * gx2;
          break;
        case Identity::kT3FullGrad:
          f = rho * rho * u * u * g2;
          break;
      }
      acc += ang_.weights[j] * f;
    }
    rows[i] = rad_.weights[i] * acc;
  }
  const double omega = constants::sphere_volume(params_.n - 1);
  const double lhs = omega * quad::deterministic_sum(rows);

  const Term grad_x{cx_ * cx_, -2.0 * (2.0 * m + 1.0), 0.0};
  const Term grad_t{ct_ * ct_, 4.0 * sigma - 2.0 - 2.0 * params_.n,
                    4.0 * sigma - 2.0};
  std::vector<Term> terms;
  switch (which) {
    case Identity::kX2FullGrad:
      terms = {{grad_x.C, grad_x.e + 2.0, grad_x.b},
               {grad_t.C, grad_t.e + 2.0, grad_t.b}};
      break;
    case Identity::kFullGrad:
      terms = {grad_x, grad_t};
      break;
    case Identity::kT3XGrad:
      terms = {{grad_x.C, grad_x.e + 2.0, grad_x.b + 2.0}};
      break;
    case Identity::kT3FullGrad:
      terms = {{grad_x.C, grad_x.e + 2.0, grad_x.b + 2.0},
               {grad_t.C, grad_t.e + 2.0, grad_t.b + 2.0}};
      break;
  }

  IdentityReport report{lhs, identity_coefficient(which, params_) * a0_, 0.0,
                        tail_integral(terms), false, params_};
  report.rel_err = std::fabs(report.lhs - report.rhs) / std::fabs(report.rhs);
  report.tail_flagged = report.tail_bound > opts_.tail_tol * std::fabs(report.rhs);
  return report;
}

double verify_A0_finite(const SobolevParams& params, OracleOptions opts) {
  Oracle oracle(params, opts);
  return oracle.A0();
}

IdentityReport verify_identity(Identity which, const SobolevParams& params,
                               OracleOptions opts) {
  return Oracle(params, opts).verify(which);
}

}  // namespace wtrace::appendix
