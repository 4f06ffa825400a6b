#include <cmath>
#include <vector>

#include "doctest.h"
#include "wtrace/geometry.hpp"

using namespace wtrace;
using geometry::CurvatureData;
using geometry::SymMatrix;

namespace {

CurvatureData umbilic_example(int n, double H) {
  CurvatureData d = CurvatureData::zero(n);
  d.H = H;
  for (int i = 0; i < n; ++i) d.pi(i, i) = H / n;
  return d;
}

}  // namespace

TEST_CASE("flat data reproduces the Euclidean metric") {
  CurvatureData d = CurvatureData::zero(4);
  d.validate();
  std::vector<double> x{0.3, -0.1, 0.2, 0.0};
  CHECK(geometry::sqrt_det_g(d, x, 0.4) == doctest::Approx(1.0).epsilon(1e-15));
  SymMatrix gi = geometry::g_inverse(d, x, 0.4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(gi(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-15));
  CHECK(geometry::validity_radius(d) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("volume density expansion") {
  const int n = 5;
  CurvatureData d = umbilic_example(n, 1.0);
  d.Rtt = 0.3;
  d.validate();
  std::vector<double> x(n, 0.0);
  const double t = 0.1;
  const double expect =
      1.0 - t + 0.5 * (1.0 - 1.0 / n - 0.3) * t * t;
  CHECK(geometry::sqrt_det_g(d, x, t) == doctest::Approx(expect).epsilon(1e-14));

  // tangential terms: H-gradient and boundary Ricci
  d.Hgrad.assign(n, 0.0);
  d.Hgrad[0] = 0.5;
  for (int i = 0; i < n; ++i) d.Rbar_ric(i, i) = 0.2;
  d.Rbar_scalar = 0.2 * n;
  d.validate();
  x[0] = 0.2;
  const double expect2 = expect - 0.5 * 0.2 * t - (0.2 * 0.04) / 6.0;
  CHECK(geometry::sqrt_det_g(d, x, t) ==
        doctest::Approx(expect2).epsilon(1e-13));
  // boundary restriction t = 0 only sees the Ricci term
  CHECK(geometry::sqrt_det_g(d, x, 0.0) ==
        doctest::Approx(1.0 - (0.2 * 0.04) / 6.0).epsilon(1e-14));
}

TEST_CASE("inverse metric expansion") {
  const int n = 3;
  CurvatureData d = CurvatureData::zero(n);
  d.pi(0, 0) = 0.4;
  d.pi(1, 1) = -0.4;
  d.Ritjt(0, 1) = 0.1;
  d.Ritjt(1, 0) = 0.1;
  d.validate();
  std::vector<double> x{0.0, 0.0, 0.0};
  const double t = 0.2;
  SymMatrix gi = geometry::g_inverse(d, x, t);
  // delta + 2 pi t + (3 pi pi + Ritjt) t^2
  CHECK(gi(0, 0) ==
        doctest::Approx(1.0 + 0.8 * t + 3.0 * 0.16 * t * t).epsilon(1e-14));
  CHECK(gi(1, 1) ==
        doctest::Approx(1.0 - 0.8 * t + 3.0 * 0.16 * t * t).epsilon(1e-14));
  CHECK(gi(0, 1) == doctest::Approx(0.1 * t * t).epsilon(1e-15));
  CHECK(gi(2, 2) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expansion is exactly quadratic along rays") {
  const int n = 4;
  CurvatureData d = umbilic_example(n, 0.7);
  d.Rtt = -0.2;
  for (int i = 0; i < n; ++i) d.Rbar_ric(i, i) = 0.1 * (i + 1);
  d.Rbar_scalar = 0.1 * (1 + 2 + 3 + 4);
  d.Hgrad.assign(n, 0.1);
  d.validate();
  std::vector<double> dir{0.3, -0.2, 0.1, 0.4};
  const double tdir = 0.25;
  auto f = [&](double lam) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = lam * dir[i];
    return geometry::sqrt_det_g(d, x, lam * tdir);
  };
  const double h = 0.37;  // any h: the function is a quadratic polynomial
  const double c0 = f(0.0);
  const double c1 = (f(h) - f(-h)) / (2.0 * h);
  const double c2 = (f(h) - 2.0 * c0 + f(-h)) / (h * h);
  CHECK(c0 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c1 == doctest::Approx(-d.H * tdir).epsilon(1e-12));
  double quad = (d.H * d.H - d.pi_norm_sq() - d.Rtt) * tdir * tdir;
  for (int i = 0; i < n; ++i) {
    quad -= 2.0 * d.Hgrad[i] * dir[i] * tdir;
    for (int j = 0; j < n; ++j)
      quad -= d.Rbar_ric(i, j) * dir[i] * dir[j] / 3.0;
  }
  CHECK(c2 == doctest::Approx(quad).epsilon(1e-11).scale(1.0));
}

TEST_CASE("validation rejects inconsistent data") {
  CurvatureData d = CurvatureData::zero(3);
  d.pi(0, 1) = 0.3;  // asymmetric
  CHECK_THROWS(d.validate());
  d = CurvatureData::zero(3);
  d.H = 1.0;  // trace(pi) == 0 != H
  CHECK_THROWS(d.validate());
  d = umbilic_example(3, 1.0);
  d.Rbar_scalar = 5.0;  // trace mismatch
  CHECK_THROWS(d.validate());
  d = CurvatureData::zero(3);
  d.Riem4.assign(81, 0.0);
  d.Riem4[0 * 27 + 0 * 9 + 1 * 3 + 1] = 1.0;  // breaks pair antisymmetry
  CHECK_THROWS(d.validate());
}

TEST_CASE("curvature criterion coefficients") {
  SobolevParams p(5, 0.5);
  CHECK(geometry::curvature_condition(p, 1.0, 0.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-13));
  CHECK(geometry::curvature_condition(p, 0.0, 1.0, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(geometry::curvature_condition(p, 0.0, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-13));
  // the criterion needs n - 2 - 2 sigma > 0
  CHECK_THROWS(geometry::curvature_condition(SobolevParams(3, 0.5), 1.0, 0, 0));
}

TEST_CASE("json round trip") {
  const int n = 3;
  CurvatureData d = umbilic_example(n, 0.9);
  d.Rtt = 0.12;
  d.Hgrad = {0.1, 0.2, 0.3};
  d.Ritjt(0, 2) = 0.05;
  d.Ritjt(2, 0) = 0.05;
  d.g_tm.assign(n * n * n, 0.0);
  d.g_tm[1 * 9 + 2 * 3 + 0] = 0.07;
  d.g_tm[2 * 9 + 1 * 3 + 0] = 0.07;  // (i,j) symmetry
  CurvatureData back = geometry::from_json(geometry::to_json(d));
  CHECK(back.n == n);
  CHECK(back.H == doctest::Approx(d.H).epsilon(1e-15));
  CHECK(back.pi(1, 1) == doctest::Approx(d.pi(1, 1)).epsilon(1e-15));
  CHECK(back.Ritjt(0, 2) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(back.g_tm[1 * 9 + 2 * 3 + 0] == doctest::Approx(0.07).epsilon(1e-15));
  CHECK(back.Hgrad[2] == doctest::Approx(0.3).epsilon(1e-15));
  // parses but fails validation: H without a matching second fundamental form
  CHECK_THROWS(geometry::from_json("{\"n\": 3, \"H\": 1.0}"));
  CHECK_THROWS(geometry::from_json("not json"));
}

TEST_CASE("validity radius shrinks with strong curvature") {
  // large Rtt drives the quadratic density negative at t ~ 1/5
  CurvatureData d = CurvatureData::zero(3);
  d.Rtt = 50.0;
  const double rho = geometry::validity_radius(d);
  CHECK(rho < 0.5);
  CHECK(rho > 0.0);
  // the density is indeed positive at radius rho along the normal ray
  std::vector<double> x(3, 0.0);
  CHECK(geometry::sqrt_det_g(d, x, 0.9 * rho) > 0.0);
}
