#include "wtrace/constants.hpp"

#include <cmath>
#include <limits>

namespace wtrace::constants {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double sharp_constant(const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  // log of: 1/(2 pi^s) * G(s)/G(1-s) * G((n-2s)/2)/G((n+2s)/2)
  //         * (G(n)/G(n/2))^{2s/n}
  double logS = -std::log(2.0) - s * std::log(kPi);
  logS += std::lgamma(s) - std::lgamma(1.0 - s);
  logS += std::lgamma(0.5 * (n - 2.0 * s)) - std::lgamma(0.5 * (n + 2.0 * s));
  logS += (2.0 * s / n) * (std::lgamma(n) - std::lgamma(0.5 * n));
  return std::exp(logS);
}

double kappa(double sigma) {
  if (sigma < 1e-6 || sigma > 1.0 - 1e-6)
    throw std::invalid_argument("kappa: sigma must lie in [1e-6, 1-1e-6]");
  return std::exp(std::lgamma(sigma) - (1.0 - 2.0 * sigma) * std::log(2.0) -
                  std::lgamma(1.0 - sigma));
}

double bubble_amplitude(const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  double log_alpha = 0.5 * (n - 2.0 * s) * std::log(2.0);
  log_alpha += (n - 2.0 * s) / (4.0 * s) *
               (std::lgamma(0.5 * (n + 2.0 * s)) - std::lgamma(0.5 * (n - 2.0 * s)));
  return std::exp(log_alpha);
}

double kernel_constant(const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  return std::exp(std::lgamma(0.5 * (n + 2.0 * s)) - 0.5 * n * std::log(kPi) -
                  std::lgamma(s));
}

double a0_ratio(const SobolevParams& params) {
  const double n = params.n;
  const double s = params.sigma;
  if (n <= 2.0 * s + 2.0)
    throw std::domain_error("a0_ratio: requires n > 2*sigma + 2");
  return (n - 2.0) * (n - 2.0 + 2.0 * s) * (n - 2.0 - 2.0 * s) /
         (4.0 * s * (n - 1.0));
}

double bubble_energy(const SobolevParams& params) {
  const double s = params.sigma;
  const double e = 0.5 * (params.n - 2.0 * s) / s;
  return std::exp(e * std::log(kappa(s)) -
                  (params.n / (2.0 * s)) * std::log(sharp_constant(params)));
}

double bubble_boundary_lp(const SobolevParams& params) {
  const double s = params.sigma;
  return std::exp((params.n / (2.0 * s)) *
                  (std::log(kappa(s)) - std::log(sharp_constant(params))));
}

double a0_closed_form(const SobolevParams& params) {
  return bubble_energy(params) / a0_ratio(params);
}

double sphere_volume(int n) {
  return 2.0 * std::exp(0.5 * (n + 1) * std::log(kPi) - std::lgamma(0.5 * (n + 1)));
}

ConstantSet evaluate(const SobolevParams& params) {
  ConstantSet c;
  c.S = sharp_constant(params);
  c.kappa = kappa(params.sigma);
  c.alpha = bubble_amplitude(params);
  c.pker = kernel_constant(params);
  c.A0_ratio = (params.n > 2.0 * params.sigma + 2.0)
                   ? a0_ratio(params)
                   : std::numeric_limits<double>::quiet_NaN();
  return c;
}

}  // namespace wtrace::constants
