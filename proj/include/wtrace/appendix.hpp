#pragma once

#include <vector>

#include "wtrace/bubble.hpp"
#include "wtrace/params.hpp"

namespace wtrace::appendix {

// The four weighted-gradient integrals verified against coefficient * A0,
// A0 = int t^{1-2 sigma} W_1^2.
enum class Identity {
  kX2FullGrad,   // int t^{1-2s} |x|^2 |grad W_1|^2
  kFullGrad,     // int t^{1-2s} |grad W_1|^2
  kT3XGrad,      // int t^{3-2s} |grad_x W_1|^2
  kT3FullGrad,   // int t^{3-2s} |grad W_1|^2
};

const char* identity_name(Identity which);

// Exact coefficient such that integral = coefficient * A0.
double identity_coefficient(Identity which, const SobolevParams& params);

struct IdentityReport {
  double lhs;         // quadrature value of the weighted integral
  double rhs;         // coefficient * A0
  double rel_err;     // |lhs - rhs| / |rhs|
  double tail_bound;  // certified truncation tail for the lhs quadrature
  bool tail_flagged;  // tail bound could not be certified below tail_tol * rhs
  SobolevParams params;
};

struct OracleOptions {
  double R = 80.0;       // truncation radius in (x,t)
  int m_radial = 48;     // nodes per radial piece
  int m_angular = 48;
  double tail_tol = 1e-4;  // relative tail target used for flagging
  bubble::ExtensionOptions ext;
};

// Evaluates W_1 and its gradients once on a shared polar grid and reduces
// the five weighted integrals against it. Requires n > 2 sigma + 2 for the
// truncation tails to be integrable.
class Oracle {
 public:
  explicit Oracle(const SobolevParams& params, OracleOptions opts = {});

  double A0() const { return a0_; }
  double A0_tail_bound() const { return a0_tail_; }

  IdentityReport verify(Identity which) const;

  const SobolevParams& params() const { return params_; }

 private:
  struct Term {
    double C;  // envelope constant
    double e;  // integrand decays like C * rho^e
    double b;  // extra angular factor u^b
  };
  double tail_integral(const std::vector<Term>& terms) const;

  SobolevParams params_;
  OracleOptions opts_;
  quad::GaussRule rad_, ang_;
  std::vector<double> wv_, wr_, wt_;  // W_1, d_r W_1, d_t W_1 at grid nodes
  double a0_ = 0.0, a0_tail_ = 0.0;
  double cw_ = 0.0, cx_ = 0.0, ct_ = 0.0;  // fitted decay-envelope constants
};

// Free-function forms of the published contract.
double verify_A0_finite(const SobolevParams& params, OracleOptions opts = {});
IdentityReport verify_identity(Identity which, const SobolevParams& params,
                               OracleOptions opts = {});

}  // namespace wtrace::appendix
