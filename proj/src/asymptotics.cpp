#include "wtrace/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wtrace/constants.hpp"
#include "wtrace/quadrature.hpp"

namespace wtrace::asymptotics {

double CutoffSpec::value(double rho) const {
  if (rho <= delta) return 1.0;
  if (rho >= 2.0 * delta) return 0.0;
  const double s = (rho - delta) / delta;
  return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double CutoffSpec::deriv(double rho) const {
  if (rho <= delta || rho >= 2.0 * delta) return 0.0;
  const double s = (rho - delta) / delta;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s) / delta;
}

ExpansionCoefficients expansion_coefficients(const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  if (n - 2.0 * s - 2.0 <= 0.0)
    throw std::invalid_argument("expansion_coefficients: requires n > 2 sigma + 2");
  const double d1 = (n - 2.0) * (n - 2.0 + 2.0 * s) * (n - 2.0 - 2.0 * s);
  ExpansionCoefficients k;
  k.K1 = -(n * n - 4.0 * n * (1.0 - s) + 4.0 * (1.0 - s - s * s)) / (6.0 * d1);
  k.K2 = -4.0 * s * (1.0 - s) * (n - 1.0) / (n * (n - 2.0) * (n - 2.0 + 2.0 * s));
  k.K3 = -4.0 * s * (1.0 - s) * (n - 1.0) * (3.0 * n - 2.0 - 2.0 * s) / (3.0 * n * d1);
  k.K1bar = k.K1 + (n - 2.0 * s) / (6.0 * n * (n - 2.0));
  return k;
}

double riem4_moment_contraction(std::span<const double> riem4, int n) {
  if (riem4.size() != static_cast<std::size_t>(n) * n * n * n)
    throw std::invalid_argument("riem4_moment_contraction: bad shape");
  auto at = [&](int i, int k, int j, int l) {
    return riem4[((static_cast<std::size_t>(i) * n + k) * n + l) * n + j];
  };
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      s1 += at(i, k, i, k);
      s2 += at(i, i, k, k);
      s3 += at(i, k, k, i);
    }
  return s1 + s2 + s3;
}

double signed_power(double u, double q) {
  const double au = std::fabs(u);
  if (au < 1e-300) return 0.0;
  const double v = std::exp(q * std::log(au));
  return u < 0.0 ? -v : v;
}

Model::Model(const SobolevParams& params, geometry::CurvatureData data,
             CutoffSpec cutoff, SweepRules rules)
    : params_(params),
      data_(std::move(data)),
      cutoff_(cutoff),
      rules_(rules),
      ext_(params, rules.ext) {
  if (data_.n != params.n)
    throw std::invalid_argument("Model: curvature data dimension != n");
  data_.validate(1e-10);
  pinorm2_ = data_.pi_norm_sq();
  tr_ritjt_ = data_.Ritjt.trace();
  csym_ = data_.Riem4.empty()
              ? 0.0
              : riem4_moment_contraction(data_.Riem4, params.n);
  const double ball =
      constants::sphere_volume(params.n - 1) *
      std::pow(2.0 * cutoff_.delta, static_cast<double>(params.n)) / params.n;
  vext_ = rules_.V_ext > 0.0 ? rules_.V_ext : 10.0 * ball;
}

bubble::RadialExtensionValue Model::bubble_at(double eps, double r, double t) const {
  bubble::RadialExtensionValue v = ext_.eval(r / eps, t / eps);
  const double m = params_.half_order();
  const double vs = std::pow(eps, -m);
  const double gs = vs / eps;
  return {vs * v.value, gs * v.dr, gs * v.dt, vs * v.err_bound};
}

double Model::density_avg(double r, double t) const {
  const double n = params_.n;
  return 1.0 - data_.H * t +
         0.5 * (data_.H * data_.H - pinorm2_ - data_.Rtt) * t * t -
         data_.Rbar_scalar * r * r / (6.0 * n);
}

double Model::metric_avg(double r, double t) const {
  const double n = params_.n;
  // direction-averaged g^{theta theta} sqrt|g|, truncated at second order;
  // the -2 H^2 t^2 / n piece is the cross term of the two first-order terms
  return density_avg(r, t) + 2.0 * data_.H * t / n -
         csym_ * r * r / (3.0 * n * (n + 2.0)) +
         t * t * (3.0 * pinorm2_ + tr_ritjt_) / n -
         2.0 * data_.H * data_.H * t * t / n;
}

double Model::energy_I1(double eps) const {
  const int n = params_.n;
  const double sigma = params_.sigma;
  quad::GaussRule rad = quad::radial_rule(n + 1.0 - 2.0 * sigma, eps,
                                          cutoff_.delta, rules_.m_radial,
                                          rules_.m_radial);
  quad::GaussRule ang = quad::angular_rule(n, sigma, rules_.m_angular);
  std::vector<double> rows(rad.size());
  for (std::size_t i = 0; i < rad.size(); ++i) {
    const double rho = rad.nodes[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      const double u = ang.nodes[j];
      const double r = rho * std::sqrt(1.0 - u * u);
      const double t = rho * u;
      bubble::RadialExtensionValue w = bubble_at(eps, r, t);
      acc += ang.weights[j] * (metric_avg(r, t) * w.dr * w.dr +
                               density_avg(r, t) * w.dt * w.dt);
    }
    rows[i] = rad.weights[i] * acc;
  }
  return constants::sphere_volume(n - 1) * quad::deterministic_sum(rows);
}

double Model::gradient_moment(double eps, int k) const {
  const int n = params_.n;
  const double sigma = params_.sigma;
  quad::GaussRule rad = quad::radial_rule(n + 1.0 - 2.0 * sigma, eps,
                                          cutoff_.delta, rules_.m_radial,
                                          rules_.m_radial);
  quad::GaussRule ang = quad::angular_rule(n, sigma, rules_.m_angular);
  std::vector<double> rows(rad.size());
  for (std::size_t i = 0; i < rad.size(); ++i) {
    const double rho = rad.nodes[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      const double u = ang.nodes[j];
      bubble::RadialExtensionValue w =
          bubble_at(eps, rho * std::sqrt(1.0 - u * u), rho * u);
      acc += ang.weights[j] * (w.dr * w.dr + w.dt * w.dt);
    }
    rows[i] = rad.weights[i] * std::pow(rho, static_cast<double>(k)) * acc;
  }
  return constants::sphere_volume(n - 1) * quad::deterministic_sum(rows);
}

double Model::energy_I2(double eps) const {
  const int n = params_.n;
  const double sigma = params_.sigma;
  quad::GaussRule rad =
      quad::legendre_rule(cutoff_.delta, 2.0 * cutoff_.delta, rules_.m_radial);
  quad::GaussRule ang = quad::angular_rule(n, sigma, rules_.m_angular);
  std::vector<double> rows(rad.size());
  for (std::size_t i = 0; i < rad.size(); ++i) {
    const double rho = rad.nodes[i];
    const double eta = cutoff_.value(rho);
    const double deta = cutoff_.deriv(rho);
    double acc = 0.0;
    for (std::size_t j = 0; j < ang.size(); ++j) {
      const double u = ang.nodes[j];
      const double r = rho * std::sqrt(1.0 - u * u);
      const double t = rho * u;
      bubble::RadialExtensionValue w = bubble_at(eps, r, t);
      const double gr = eta * w.dr + deta * (r / rho) * w.value;
      const double gt = eta * w.dt + deta * (t / rho) * w.value;
      acc += ang.weights[j] * (gr * gr + gt * gt);
    }
    rows[i] =
        rad.weights[i] * std::pow(rho, n + 1.0 - 2.0 * sigma) * acc;
  }
  return constants::sphere_volume(n - 1) * quad::deterministic_sum(rows);
}

namespace {

double boundary_profile(const SobolevParams& params, double eps, double r) {
  return std::pow(eps, -params.half_order()) *
         bubble::w_radial(params, r / eps);
}

}  // namespace

double Model::solve_mu(double eps) const {
  const int n = params_.n;
  const double p = params_.p;
  quad::GaussRule rule = quad::radial_rule(n - 1.0, eps, 2.0 * cutoff_.delta,
                                           rules_.m_boundary, rules_.m_boundary);
  const double omega = constants::sphere_volume(n - 1);

  auto constraint = [&](double mu) {
    std::vector<double> rows(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double r = rule.nodes[i];
      const double phi = cutoff_.value(r) * boundary_profile(params_, eps, r) - mu;
      const double dens = 1.0 - data_.Rbar_scalar * r * r / (6.0 * n);
      rows[i] = rule.weights[i] * signed_power(phi, p - 1.0) * dens;
    }
    return omega * quad::deterministic_sum(rows) -
           vext_ * signed_power(mu, p - 1.0);
  };

  double lo = 0.0;
  double hi = boundary_profile(params_, eps, 0.0);
  if (!(constraint(lo) > 0.0) || !(constraint(hi) < 0.0))
    throw std::runtime_error("solve_mu: constraint bracket failure");
  for (int it = 0; it < 500 && hi - lo > rules_.mu_rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (constraint(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double Model::boundary_lp(double eps, double mu) const {
  const int n = params_.n;
  const double p = params_.p;
  quad::GaussRule rule = quad::radial_rule(n - 1.0, eps, 2.0 * cutoff_.delta,
                                           rules_.m_boundary, rules_.m_boundary);
  std::vector<double> rows(rule.size());
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i];
    const double phi = cutoff_.value(r) * boundary_profile(params_, eps, r) - mu;
    const double dens = 1.0 - data_.Rbar_scalar * r * r / (6.0 * n);
    rows[i] = rule.weights[i] * std::pow(std::fabs(phi), p) * dens;
  }
  return constants::sphere_volume(n - 1) * quad::deterministic_sum(rows) +
         vext_ * std::pow(mu, p);
}

SweepRow Model::evaluate(double eps) const {
  if (eps <= 0.0 || eps >= cutoff_.delta)
    throw std::invalid_argument("Model::evaluate: need 0 < eps < delta");
  SweepRow row;
  row.eps = eps;
  row.mu_eps = solve_mu(eps);
  row.I1 = energy_I1(eps);
  row.I2 = energy_I2(eps);
  row.boundary_lp = boundary_lp(eps, row.mu_eps);
  row.quotient = (row.I1 + row.I2) /
                 std::pow(row.boundary_lp, 2.0 / params_.p);
  return row;
}

std::vector<SweepRow> Model::sweep(std::span<const double> eps_values) const {
  std::vector<SweepRow> rows;
  rows.reserve(eps_values.size());
  for (double eps : eps_values) rows.push_back(evaluate(eps));
  return rows;
}

namespace {

std::vector<std::size_t> smallest_indices(std::span<const double> x, int k) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), std::max(k, 2)));
  return idx;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double nn = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace

double fit_loglog_slope(std::span<const double> eps, std::span<const double> vals,
                        int use_smallest) {
  if (eps.size() != vals.size() || eps.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching arrays, size >= 2");
  std::vector<double> lx, ly;
  for (std::size_t i : smallest_indices(eps, use_smallest)) {
    lx.push_back(std::log(eps[i]));
    ly.push_back(std::log(std::fabs(vals[i])));
  }
  return ls_slope(lx, ly);
}

double fit_linear_slope(std::span<const double> x, std::span<const double> y,
                        int use_smallest) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_linear_slope: need matching arrays, size >= 2");
  std::vector<double> lx, ly;
  for (std::size_t i : smallest_indices(x, use_smallest)) {
    lx.push_back(x[i]);
    ly.push_back(y[i]);
  }
  return ls_slope(lx, ly);
}

}  // namespace wtrace::asymptotics
