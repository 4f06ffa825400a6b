#include <cmath>
#include <vector>

#include "doctest.h"
#include "wtrace/constants.hpp"
#include "wtrace/quadrature.hpp"

using namespace wtrace;

namespace {
constexpr double kPi = 3.14159265358979323846;

double beta_fn(double a, double b) {
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}
}  // namespace

TEST_CASE("Legendre rule integrates polynomials exactly") {
  quad::GaussRule rule = quad::jacobi_gauss(0.0, 0.0, 8);
  for (int k = 0; k <= 15; ++k) {
    const double exact = (k % 2 == 0) ? 2.0 / (k + 1.0) : 0.0;
    const double got = rule.integrate([&](double x) { return std::pow(x, k); });
    CHECK(got == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("Jacobi rule moments") {
  // int_{-1}^1 (1-x)^a (1+x)^b x dx against analytic Beta expressions
  const double a = 1.3, b = -0.4;
  quad::GaussRule rule = quad::jacobi_gauss(a, b, 12);
  const double mu0 = std::pow(2.0, a + b + 1.0) * beta_fn(a + 1.0, b + 1.0);
  CHECK(rule.integrate([](double) { return 1.0; }) ==
        doctest::Approx(mu0).epsilon(1e-13));
  const double mu1 = mu0 * (b - a) / (a + b + 2.0);
  CHECK(rule.integrate([](double x) { return x; }) ==
        doctest::Approx(mu1).epsilon(1e-12).scale(mu0));
}

TEST_CASE("power rule on [0, T]") {
  const double a = -0.5, T = 2.0;
  quad::GaussRule rule = quad::power_rule(a, T, 10);
  for (int k = 0; k <= 5; ++k) {
    const double exact = std::pow(T, a + k + 1.0) / (a + k + 1.0);
    CHECK(rule.integrate([&](double t) { return std::pow(t, k); }) ==
          doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("log-substituted rule handles wide ranges") {
  // int_{1e-6}^{10} t^{0.5} e^{-t} dt, reference by fine composite Legendre
  auto f = [](double t) { return std::exp(-t); };
  quad::GaussRule rule = quad::log_rule(0.5, 1e-6, 10.0, 60);
  double ref = 0.0;
  for (int piece = 0; piece < 60; ++piece) {
    const double lo = 1e-6 * std::pow(10.0 / 1e-6, piece / 60.0);
    const double hi = 1e-6 * std::pow(10.0 / 1e-6, (piece + 1) / 60.0);
    ref += quad::legendre_rule(lo, hi, 16).integrate(
        [&](double t) { return std::pow(t, 0.5) * f(t); });
  }
  CHECK(rule.integrate(f) == doctest::Approx(ref).epsilon(1e-11));
}

TEST_CASE("composite radial rule") {
  // int_0^R rho^a (1 + (rho/s)^2)^{-4} d rho, concentration scale s
  const double a = 2.5, s = 0.01, R = 10.0;
  auto f = [&](double rho) { return std::pow(1.0 + (rho / s) * (rho / s), -4.0); };
  quad::GaussRule rule = quad::radial_rule(a, s, R, 40, 40);
  // reference: substitute rho = s u, integral = s^{a+1} int u^a (1+u^2)^{-4}
  // with a negligible truncation remainder
  double ref = std::pow(s, a + 1.0) *
               quad::radial_rule(a, 1.0, R / s, 60, 60)
                   .integrate([](double u) { return std::pow(1.0 + u * u, -4.0); });
  CHECK(rule.integrate(f) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("angular rule total mass") {
  for (auto [n, sigma] : {std::pair{3, 0.5}, {5, 0.25}, {7, 0.75}}) {
    quad::GaussRule rule = quad::angular_rule(n, sigma, 24);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    // int_0^1 u^{1-2s}(1-u^2)^{(n-2)/2} du = B(1-s, n/2)/2
    CHECK(total == doctest::Approx(0.5 * beta_fn(1.0 - sigma, 0.5 * n))
                       .epsilon(1e-13));
  }
}

TEST_CASE("spherical-mean rule total mass") {
  for (int n : {2, 3, 5, 8}) {
    quad::GaussRule rule = quad::gegenbauer_rule(n, 20);
    double total = 0.0;
    for (double w : rule.weights) total += w;
    CHECK(constants::sphere_volume(n - 2) * total ==
          doctest::Approx(constants::sphere_volume(n - 1)).epsilon(1e-13));
  }
}

TEST_CASE("published weight-rule contract") {
  quad::JacobiRule jr = quad::jacobi_rule(0.3, 2.0, 16);
  CHECK(jr.exponent == doctest::Approx(0.4).epsilon(1e-15));
  const double exact = std::pow(2.0, 1.4) / 1.4;
  CHECK(jr.rule.integrate([](double) { return 1.0; }) ==
        doctest::Approx(exact).epsilon(1e-13));
  CHECK_THROWS_AS(quad::jacobi_rule(1.2, 1.0, 16), std::invalid_argument);
}

TEST_CASE("deterministic summation") {
  std::vector<double> vals;
  long double ref = 0.0L;
  for (int i = 0; i < 5000; ++i) {
    const double v = std::sin(0.1 * i) * std::pow(10.0, (i % 7) - 3);
    vals.push_back(v);
    ref += v;
  }
  CHECK(quad::deterministic_sum(vals) ==
        doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
  auto f = [&](std::size_t i) { return vals[i]; };
  const double serial = quad::parallel_deterministic_sum(vals.size(), f, 1);
  const double parallel = quad::parallel_deterministic_sum(vals.size(), f, 4);
  CHECK(serial == parallel);  // bitwise: same reduction order
}

TEST_CASE("weighted half-ball integral") {
  // int_{t>0, |(x,t)|<R} t^{1-2s} e^{-rho^2}: separable in polar form
  SobolevParams p(3, 0.3);
  auto f = [](double r, double t) { return std::exp(-(r * r + t * t)); };
  quad::IntegralResult res = quad::half_ball_integral_radial(f, p, 8.0, 1.0, 40, 30);
  const double radial = 0.5 * std::tgamma(0.5 * (p.n + 2.0 - 2.0 * p.sigma));
  const double angular = 0.5 * beta_fn(1.0 - p.sigma, 0.5 * p.n);
  const double exact = constants::sphere_volume(p.n - 1) * angular * radial;
  CHECK(res.value == doctest::Approx(exact).epsilon(1e-9));

  // tail certificate is honored when the envelope is supplied
  quad::IntegralResult res2 = quad::half_ball_integral_radial(
      f, p, 8.0, 1.0, 40, 30, {1.0, 20.0});
  CHECK(res2.tail_bound > 0.0);
  CHECK(res2.value == doctest::Approx(res.value).epsilon(1e-14));

  CHECK_THROWS(quad::half_ball_integral_radial(
      [](double, double) { return std::numeric_limits<double>::quiet_NaN(); }, p,
      1.0, 1.0, 4, 4));
}

TEST_CASE("tensor half-space integral") {
  // int over [-1,1]^2 x (0,1] of t^{1-2s} x1^2: separable
  SobolevParams p(2, 0.25);
  auto f = [](std::span<const double> x, double) { return x[0] * x[0]; };
  quad::IntegralResult res = quad::half_space_integral(f, p, 1.0, 1.0, 12, 12);
  const double exact = (2.0 / 3.0) * 2.0 * (1.0 / (2.0 - 2.0 * p.sigma));
  CHECK(res.value == doctest::Approx(exact).epsilon(1e-12));
}
