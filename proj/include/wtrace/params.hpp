#pragma once

#include <stdexcept>

namespace wtrace {

// Sobolev parameters: boundary dimension n, order sigma in (0,1),
// critical trace exponent p = 2n/(n-2*sigma).
struct SobolevParams {
  int n;
  double sigma;
  double p;

  SobolevParams(int n_, double sigma_) : n(n_), sigma(sigma_) {
    if (n < 2) throw std::invalid_argument("SobolevParams: n must be >= 2");
    if (sigma < 1e-6 || sigma > 1.0 - 1e-6)
      throw std::invalid_argument("SobolevParams: sigma must lie in [1e-6, 1-1e-6]");
    if (static_cast<double>(n) <= 2.0 * sigma)
      throw std::invalid_argument("SobolevParams: need n > 2*sigma");
    p = 2.0 * n / (n - 2.0 * sigma);
  }

  // (n - 2*sigma)/2, the bubble decay exponent.
  double half_order() const { return 0.5 * (n - 2.0 * sigma); }
};

}  // namespace wtrace
