#include <cmath>

#include "doctest.h"
#include "wtrace/constants.hpp"

using namespace wtrace;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SobolevParams(1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(SobolevParams(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(SobolevParams(3, 1.0), std::invalid_argument);
  SobolevParams p(5, 0.5);
  CHECK(p.p == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(p.half_order() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("sharp constant closed forms agree at sigma = 1/2") {
  // classical form: S(n, 1/2) = (2/(n-1)) * omega_n^{-1/n}
  SobolevParams p3(3, 0.5);
  const double omega3 = 2.0 * kPi * kPi;
  CHECK(constants::sharp_constant(p3) ==
        doctest::Approx(std::pow(omega3, -1.0 / 3.0)).epsilon(1e-13));
  for (int n = 2; n <= 10; ++n) {
    SobolevParams p(n, 0.5);
    const double omega = constants::sphere_volume(n);
    const double classical = 2.0 / (n - 1.0) * std::pow(omega, -1.0 / n);
    CHECK(constants::sharp_constant(p) ==
          doctest::Approx(classical).epsilon(1e-12));
  }
}

TEST_CASE("kappa") {
  CHECK(constants::kappa(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  // direct ratio at sigma = 1/4: Gamma(1/4) / (2^{1/2} Gamma(3/4))
  const double direct =
      std::tgamma(0.25) / (std::sqrt(2.0) * std::tgamma(0.75));
  CHECK(constants::kappa(0.25) == doctest::Approx(direct).epsilon(1e-14));
  CHECK_THROWS_AS(constants::kappa(0.0), std::invalid_argument);
}

TEST_CASE("energy ratio coefficient") {
  CHECK(constants::a0_ratio(SobolevParams(5, 0.5)) ==
        doctest::Approx(3.0).epsilon(1e-14));
  // hypothesis n > 2 sigma + 2 fails at (3, 0.6)
  CHECK_THROWS_AS(constants::a0_ratio(SobolevParams(3, 0.6)), std::domain_error);
}

TEST_CASE("sphere volumes") {
  CHECK(constants::sphere_volume(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(constants::sphere_volume(1) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(constants::sphere_volume(2) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(constants::sphere_volume(3) ==
        doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
}

TEST_CASE("bubble energy / boundary norm identity") {
  for (auto [n, s] : {std::pair{3, 0.5}, {5, 0.3}, {7, 0.75}}) {
    SobolevParams p(n, s);
    const double e = constants::bubble_energy(p);
    const double b = constants::bubble_boundary_lp(p);
    // quotient of the extremal equals the inverse sharp constant exactly
    CHECK(e / std::pow(b, 2.0 / p.p) ==
          doctest::Approx(1.0 / constants::sharp_constant(p)).epsilon(1e-12));
  }
}

TEST_CASE("constant set") {
  constants::ConstantSet c = constants::evaluate(SobolevParams(5, 0.5));
  CHECK(c.A0_ratio == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(c.kappa == doctest::Approx(1.0).epsilon(1e-15));
  // n <= 2 sigma + 2: ratio unavailable
  constants::ConstantSet c3 = constants::evaluate(SobolevParams(3, 0.5));
  CHECK(std::isnan(c3.A0_ratio));
}
