#include <cmath>

#include "doctest.h"
#include "wtrace/appendix.hpp"
#include "wtrace/constants.hpp"

using namespace wtrace;
using appendix::Identity;

TEST_CASE("identity coefficients") {
  SobolevParams p5(5, 0.5);
  CHECK(appendix::identity_coefficient(Identity::kX2FullGrad, p5) ==
        doctest::Approx(10.0).epsilon(1e-13));
  CHECK(appendix::identity_coefficient(Identity::kFullGrad, p5) ==
        doctest::Approx(constants::a0_ratio(p5)).epsilon(1e-15));
  // t^3 identities: 2(1-sigma^2)/3 and 2(1-sigma)
  CHECK(appendix::identity_coefficient(Identity::kT3XGrad, p5) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(appendix::identity_coefficient(Identity::kT3FullGrad, p5) ==
        doctest::Approx(1.0).epsilon(1e-14));
  SobolevParams p7(7, 0.25);
  CHECK(appendix::identity_coefficient(Identity::kT3XGrad, p7) ==
        doctest::Approx(2.0 * (1.0 - 0.0625) / 3.0).epsilon(1e-14));
  CHECK(appendix::identity_coefficient(Identity::kT3FullGrad, p7) ==
        doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("integrability gate") {
  // n > 2 sigma + 2 required for the weighted L2 norm of W_1 to converge
  CHECK_THROWS_AS(appendix::Oracle(SobolevParams(3, 0.6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(appendix::Oracle(SobolevParams(3, 0.5)),
                  std::invalid_argument);
}

TEST_CASE("weighted L2 mass matches the closed-form ratio route") {
  // At (5, 1/2) the full-gradient integral has closed form
  // a0_ratio * A0 and A0 itself has a closed form; compare the grid value.
  SobolevParams p(5, 0.5);
  appendix::Oracle oracle(p);
  // truncation at the default radius leaves an O(R^-2) tail here
  CHECK(oracle.A0() ==
        doctest::Approx(constants::a0_closed_form(p)).epsilon(2e-3));
  CHECK(oracle.A0_tail_bound() < 5e-3 * oracle.A0());
  const double gap = std::fabs(oracle.A0() - constants::a0_closed_form(p));
  CHECK(gap < oracle.A0_tail_bound());
}

TEST_CASE("all four identities at (5, 1/2)") {
  SobolevParams p(5, 0.5);
  appendix::Oracle oracle(p);
  for (Identity which : {Identity::kX2FullGrad, Identity::kFullGrad,
                         Identity::kT3XGrad, Identity::kT3FullGrad}) {
    appendix::IdentityReport rep = oracle.verify(which);
    INFO(appendix::identity_name(which));
    CHECK(rep.rel_err < 1e-2);
    CHECK(rep.rhs == doctest::Approx(appendix::identity_coefficient(which, p) *
                                     oracle.A0()).epsilon(1e-15));
  }
}

TEST_CASE("identities away from sigma = 1/2") {
  SobolevParams p(5, 0.3);
  appendix::Oracle oracle(p);
  for (Identity which : {Identity::kFullGrad, Identity::kT3FullGrad}) {
    appendix::IdentityReport rep = oracle.verify(which);
    INFO(appendix::identity_name(which));
    CHECK(rep.rel_err < 1e-2);
  }
}

TEST_CASE("truncation coherence between radii") {
  // halving the truncation radius changes the value by no more than the
  // certified tail bounds
  SobolevParams p(5, 0.5);
  appendix::OracleOptions small;
  small.R = 40.0;
  appendix::Oracle coarse(p, small);
  appendix::Oracle fine(p);
  const double gap = std::fabs(coarse.A0() - fine.A0());
  CHECK(gap <= coarse.A0_tail_bound() + fine.A0_tail_bound());
}
