#include "wtrace/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wtrace/constants.hpp"
#include "wtrace/kernels.hpp"

namespace wtrace::quad {

namespace {

// Eigenvalues and first eigenvector components of a symmetric tridiagonal
// matrix, QL with implicit shifts (EISPACK imtql2 specialized to the
// Golub-Welsch first-row vector).
void tridiag_eigen_first_row(std::vector<double>& d, std::vector<double>& e,
                             std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  z.assign(n, 0.0);
  if (n == 0) return;
  z[0] = 1.0;
  if (n == 1) return;
  e.push_back(0.0);

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 1e-15 * dd) break;
      }
      if (m != l) {
        if (iter++ == 50)
          throw std::runtime_error("jacobi_gauss: tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (int i = m - 1; i >= l; --i) {
          double f = s * e[i];
          double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = (i >= l);
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

double GaussRule::integrate(const std::function<double(double)>& f) const {
  std::vector<double> vals(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = f(nodes[i]);
  return kernels::weighted_sum(weights, vals);
}

GaussRule jacobi_gauss(double alpha, double beta, int m) {
  if (m < 1) throw std::invalid_argument("jacobi_gauss: m >= 1 required");
  if (alpha <= -1.0 || beta <= -1.0)
    throw std::invalid_argument("jacobi_gauss: exponents must be > -1");

  const double ab = alpha + beta;
  std::vector<double> d(m), e(m > 1 ? m - 1 : 0);
  d[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < m; ++k) {
    double t = 2.0 * k + ab;
    d[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
  }
  if (m > 1) {
    e[0] = std::sqrt(4.0 * (alpha + 1.0) * (beta + 1.0) /
                     ((ab + 2.0) * (ab + 2.0) * (ab + 3.0)));
    for (int k = 2; k < m; ++k) {
      double t = 2.0 * k + ab;
      e[k - 1] = std::sqrt(4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
                           (t * t * (t + 1.0) * (t - 1.0)));
    }
  }

  std::vector<double> z;
  tridiag_eigen_first_row(d, e, z);

  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));

  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return d[a] < d[b]; });

  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    rule.nodes[i] = d[idx[i]];
    rule.weights[i] = mu0 * z[idx[i]] * z[idx[i]];
  }
  return rule;
}

GaussRule power_rule(double a, double T, int m) {
  if (T <= 0.0) throw std::invalid_argument("power_rule: T > 0 required");
  GaussRule base = jacobi_gauss(0.0, a, m);
  const double half = 0.5 * T;
  const double scale = std::pow(half, a + 1.0);
  for (int i = 0; i < m; ++i) {
    base.nodes[i] = half * (1.0 + base.nodes[i]);
    base.weights[i] *= scale;
  }
  return base;
}

GaussRule legendre_rule(double lo, double hi, int m) {
  GaussRule base = jacobi_gauss(0.0, 0.0, m);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (int i = 0; i < m; ++i) {
    base.nodes[i] = mid + half * base.nodes[i];
    base.weights[i] *= half;
  }
  return base;
}

GaussRule log_rule(double a, double lo, double hi, int m) {
  if (!(0.0 < lo && lo < hi)) throw std::invalid_argument("log_rule: need 0 < lo < hi");
  GaussRule base = legendre_rule(0.0, 1.0, m);
  const double lambda = std::log(hi / lo);
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    double t = lo * std::exp(lambda * base.nodes[i]);
    rule.nodes[i] = t;
    rule.weights[i] = base.weights[i] * lambda * std::pow(t, a + 1.0);
  }
  return rule;
}

GaussRule radial_rule(double a, double scale, double R, int m_inner, int m_outer) {
  if (R <= 0.0 || scale <= 0.0)
    throw std::invalid_argument("radial_rule: positive scale and R required");
  const double split = 8.0 * scale;
  if (split >= 0.5 * R) return power_rule(a, R, m_inner + m_outer);
  GaussRule inner = power_rule(a, split, m_inner);
  GaussRule outer = log_rule(a, split, R, m_outer);
  inner.nodes.insert(inner.nodes.end(), outer.nodes.begin(), outer.nodes.end());
  inner.weights.insert(inner.weights.end(), outer.weights.begin(), outer.weights.end());
  return inner;
}

GaussRule angular_rule(int n, double sigma, int m) {
  // u^{1-2s}(1-u^2)^{(n-2)/2} du on (0,1): split (1-u^2) = (1-u)(1+u) and
  // absorb the endpoint factors u^{1-2s}, (1-u)^{(n-2)/2} into a Jacobi
  // weight; the smooth (1+u)^{(n-2)/2} factor multiplies the weights, so
  // integrands smooth in u converge spectrally.
  const double a = 0.5 * (n - 2);
  const double b = 1.0 - 2.0 * sigma;
  GaussRule base = jacobi_gauss(a, b, m);
  const double factor = std::pow(2.0, -(a + b + 1.0));
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (int i = 0; i < m; ++i) {
    const double u = 0.5 * (1.0 + base.nodes[i]);
    rule.nodes[i] = u;
    rule.weights[i] = factor * base.weights[i] * std::pow(1.0 + u, a);
  }
  return rule;
}

GaussRule gegenbauer_rule(int n, int m) {
  return jacobi_gauss(0.5 * (n - 3), 0.5 * (n - 3), m);
}

JacobiRule jacobi_rule(double sigma, double T, int m) {
  if (sigma <= 0.0 || sigma >= 1.0)
    throw std::invalid_argument("jacobi_rule: sigma in (0,1) required");
  if (m < 2) throw std::invalid_argument("jacobi_rule: m >= 2 required");
  JacobiRule jr;
  jr.exponent = 1.0 - 2.0 * sigma;
  jr.T = T;
  jr.rule = power_rule(jr.exponent, T, m);
  return jr;
}

double deterministic_sum(std::span<const double> partials) {
  double sum = 0.0, comp = 0.0;
  for (double v : partials) {
    double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double parallel_deterministic_sum(std::size_t count,
                                  const std::function<double(std::size_t)>& f,
                                  int threads) {
  std::vector<double> vals(count);
  if (threads <= 1 || count < 64) {
    for (std::size_t i = 0; i < count; ++i) vals[i] = f(i);
  } else {
    const std::size_t nt = std::min<std::size_t>(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (std::size_t t = 0; t < nt; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < count; i += nt) vals[i] = f(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return deterministic_sum(vals);
}

IntegralResult half_ball_integral_radial(
    const std::function<double(double, double)>& f, const SobolevParams& params,
    double R, double scale, int m_radial, int m_angular, TailEnvelope tail,
    int threads) {
  const int n = params.n;
  const double sigma = params.sigma;
  GaussRule rad = radial_rule(n + 1.0 - 2.0 * sigma, scale, R,
                              m_radial, m_radial);
  GaussRule ang = angular_rule(n, sigma, m_angular);
  const double omega = constants::sphere_volume(n - 1);

  double value =
      omega * parallel_deterministic_sum(
                  rad.size(),
                  [&](std::size_t i) {
                    const double rho = rad.nodes[i];
                    double row = 0.0;
                    for (std::size_t j = 0; j < ang.size(); ++j) {
                      const double u = ang.nodes[j];
                      double v = f(rho * std::sqrt(1.0 - u * u), rho * u);
                      if (!std::isfinite(v))
                        throw std::runtime_error(
                            "half_ball_integral_radial: non-finite integrand sample");
                      row += ang.weights[j] * v;
                    }
                    return rad.weights[i] * row;
                  },
                  threads);

  double bound = 0.0;
  if (tail.C > 0.0) {
    const double decay = tail.q - (n + 2.0 - 2.0 * sigma);
    if (decay <= 0.0)
      throw std::runtime_error("half_ball_integral_radial: tail envelope not integrable");
    const double ang_total =
        std::accumulate(ang.weights.begin(), ang.weights.end(), 0.0);
    bound = omega * ang_total * tail.C * std::pow(R, -decay) / decay;
  }
  return {value, bound};
}

IntegralResult half_space_integral(
    const std::function<double(std::span<const double>, double)>& f,
    const SobolevParams& params, double T, double R, int m_x, int m_t) {
  const int n = params.n;
  GaussRule tr = power_rule(1.0 - 2.0 * params.sigma, T, m_t);
  GaussRule xr = legendre_rule(-R, R, m_x);

  std::vector<double> x(n);
  std::vector<int> idx(n, 0);
  std::vector<double> partials;
  partials.reserve(tr.size());
  for (std::size_t it = 0; it < tr.size(); ++it) {
    double acc_t = 0.0;
    std::fill(idx.begin(), idx.end(), 0);
    // odometer over the tensor x-grid
    while (true) {
      double wx = 1.0;
      for (int d = 0; d < n; ++d) {
        x[d] = xr.nodes[idx[d]];
        wx *= xr.weights[idx[d]];
      }
      double v = f(x, tr.nodes[it]);
      if (!std::isfinite(v))
        throw std::runtime_error("half_space_integral: non-finite integrand sample");
      acc_t += wx * v;
      int d = 0;
      while (d < n && ++idx[d] == static_cast<int>(xr.size())) idx[d++] = 0;
      if (d == n) break;
    }
    partials.push_back(tr.weights[it] * acc_t);
  }
  return {deterministic_sum(partials), 0.0};
}

}  // namespace wtrace::quad
