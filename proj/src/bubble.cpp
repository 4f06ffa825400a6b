#include "wtrace/bubble.hpp"

#include <cmath>
#include <stdexcept>

#include "wtrace/constants.hpp"

namespace wtrace::bubble {

namespace {

double radius_from(const BubbleSpec& spec, std::span<const double> x) {
  double s2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - (i < spec.x0.size() ? spec.x0[i] : 0.0);
    s2 += d * d;
  }
  return std::sqrt(s2);
}

}  // namespace

double w_radial(const SobolevParams& params, double s) {
  const double m = params.half_order();
  return constants::bubble_amplitude(params) * std::pow(1.0 + s * s, -m);
}

double dw_radial(const SobolevParams& params, double s) {
  const double m = params.half_order();
  return -2.0 * m * s * constants::bubble_amplitude(params) *
         std::pow(1.0 + s * s, -m - 1.0);
}

double w(const BubbleSpec& spec, const SobolevParams& params,
         std::span<const double> x) {
  const double s = radius_from(spec, x) / spec.eps;
  return std::pow(spec.eps, -params.half_order()) * w_radial(params, s);
}

RadialExtensionValue closed_form_half(const SobolevParams& params, double r,
                                      double t) {
  const double m = params.half_order();  // (n-1)/2 at sigma = 1/2
  const double alpha = constants::bubble_amplitude(params);
  const double D = (1.0 + t) * (1.0 + t) + r * r;
  const double Dm = std::pow(D, -m);
  return {alpha * Dm, -2.0 * m * alpha * r * Dm / D,
          -2.0 * m * alpha * (1.0 + t) * Dm / D, 0.0};
}

SigmaExtension::SigmaExtension(const SobolevParams& params, ExtensionOptions opts)
    : params_(params),
      opts_(opts),
      profile_([p = params](double s) { return w_radial(p, s); }),
      profile_deriv_([p = params](double s) { return dw_radial(p, s); }),
      bubble_profile_(true),
      pker_(constants::kernel_constant(params)),
      geg_(quad::gegenbauer_rule(params.n, opts.m_angular)),
      geg_half_(quad::gegenbauer_rule(params.n, 3 * opts.m_angular / 4 + 2)),
      inner_(quad::power_rule(params.n - 1.0, 1.0, opts.m_q)),
      inner_half_(quad::power_rule(params.n - 1.0, 1.0, 3 * opts.m_q / 4 + 2)),
      tail_(quad::power_rule(2.0 * params.sigma - 1.0, 1.0, opts.m_q)),
      tail_half_(quad::power_rule(2.0 * params.sigma - 1.0, 1.0, 3 * opts.m_q / 4 + 2)) {}

SigmaExtension::SigmaExtension(const SobolevParams& params,
                               std::function<double(double)> profile,
                               std::function<double(double)> profile_deriv,
                               ExtensionOptions opts)
    : SigmaExtension(params, opts) {
  profile_ = std::move(profile);
  profile_deriv_ = std::move(profile_deriv);
  bubble_profile_ = false;
}

namespace {

struct MeanPair {
  double s;   // spherical mean of the profile over the sphere |y - x| = q
  double sr;  // its derivative in r = |x|
};

// omega_{n-2} int (1-c^2)^{(n-3)/2} f(rho*) dc, rho* = sqrt(r^2+q^2-2rqc),
// together with the analytic r-derivative.
//
// For r q > 0 the integral is transformed to the chord variable
// s = rho* in [|r-q|, r+q]: the peak of a profile concentrated near the
// origin then sits at a fixed location in s regardless of how small an
// angle it subtends on the sphere, and the endpoint factors
// (hi-s)^e (s-lo)^e, e = (n-3)/2, are exactly the (affinely mapped)
// weight of the same Gegenbauer rule. The degenerate axes r = 0 or q = 0
// keep the direct cosine form.
MeanPair spherical_mean(const quad::GaussRule& geg, int n,
                        const std::function<double(double)>& f,
                        const std::function<double(double)>& df,
                        bool bubble_profile, const SobolevParams& params,
                        double r, double q) {
  const double omega = constants::sphere_volume(n - 2);
  auto ratio_at = [&](double rho) {
    if (rho > 1e-10) return df(rho) / rho;
    if (bubble_profile)
      // lim_{s->0} w'(s)/s = -2 m alpha
      return -2.0 * params.half_order() * constants::bubble_amplitude(params);
    return 0.0;  // smooth radial data has f'(0) = 0
  };

  double acc = 0.0, accr = 0.0;
  if (r > 1e-12 && q > 1e-12) {
    const double e = 0.5 * (n - 3);
    const double lo = std::fabs(r - q), hi = r + q;
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const double scale = std::pow(half, 2.0 * e + 1.0) /
                         (std::pow(2.0 * r * q, 2.0 * e) * r * q);
    for (std::size_t i = 0; i < geg.size(); ++i) {
      const double s = mid + half * geg.nodes[i];
      const double smooth =
          geg.weights[i] * s * std::pow((s + lo) * (hi + s), e) * scale;
      acc += smooth * f(s);
      accr += smooth * ratio_at(s) * (r * r - q * q + s * s) / (2.0 * r);
    }
  } else {
    for (std::size_t i = 0; i < geg.size(); ++i) {
      const double c = geg.nodes[i];
      const double rho2 = r * r + q * q - 2.0 * r * q * c;
      const double rho = std::sqrt(std::max(rho2, 0.0));
      acc += geg.weights[i] * f(rho);
      accr += geg.weights[i] * ratio_at(rho) * (r - q * c);
    }
  }
  return {omega * acc, omega * accr};
}

struct Rules {
  const quad::GaussRule* geg;
  const quad::GaussRule* inner;
  const quad::GaussRule* tail;
  int m_log;
};

}  // namespace

RadialExtensionValue SigmaExtension::eval_quadrature(double r, double t) const {
  if (t <= 0.0)
    throw std::invalid_argument("SigmaExtension: t > 0 required");

  auto run = [&](const Rules& ru) {
    const int n = params_.n;
    const double sigma = params_.sigma;
    const double ns2 = 0.5 * (n + 2.0 * sigma);
    const double Q = std::max(4.0 * (r + 1.0), t);

    auto mean = [&](double q) {
      return spherical_mean(*ru.geg, n, profile_, profile_deriv_, bubble_profile_,
                            params_, r, q);
    };

    double v = 0.0, vr = 0.0, vt = 0.0;
    // Accumulate one q node; wq must include the q^{n-1} measure.
    auto add_q = [&](double q, double wq) {
      const double den = q * q + t * t;
      const double K = std::pow(t, 2.0 * sigma) * std::pow(den, -ns2);
      const MeanPair mp = mean(q);
      const double wk = wq * K;
      v += wk * mp.s;
      vr += wk * mp.sr;
      vt += wk * mp.s * (2.0 * sigma / t - (n + 2.0 * sigma) * t / den);
    };
    auto add_rule = [&](const quad::GaussRule& rr) {
      for (std::size_t i = 0; i < rr.size(); ++i) add_q(rr.nodes[i], rr.weights[i]);
    };
    auto add_leg = [&](double lo, double hi) {
      quad::GaussRule rr = quad::legendre_rule(lo, hi, ru.m_log);
      for (std::size_t i = 0; i < rr.size(); ++i)
        add_q(rr.nodes[i],
              rr.weights[i] * std::pow(rr.nodes[i], n - 1.0));
    };
    // nodes geometrically graded in the distance x = |q - r| to the mean's
    // feature at q = r (the sphere through the profile peak)
    auto add_logx = [&](double sign, double xlo, double xhi) {
      quad::GaussRule rr = quad::log_rule(0.0, xlo, xhi, ru.m_log);
      for (std::size_t i = 0; i < rr.size(); ++i) {
        const double q = r + sign * rr.nodes[i];
        add_q(q, rr.weights[i] * std::pow(q, n - 1.0));
      }
    };

    // The spherical mean M(q) varies on scale ~1 around q = r (where the
    // integration sphere meets the profile's core); that feature needs its
    // own graded pieces on top of the kernel grading whenever it could
    // fall between kernel-graded nodes.
    if (t > 2.0 && t > r - 2.0) {
      // the feature sits inside the kernel-scale region, but t > 2 keeps
      // the kernel benign: explicit q pieces on [0, Q]
      const double qcore = std::min(r + 2.0, Q);
      if (r - 2.0 > 0.1) {
        add_rule(quad::power_rule(n - 1.0, r - 2.0, ru.m_log));
        add_leg(r - 2.0, qcore);
      } else {
        add_rule(quad::power_rule(n - 1.0, qcore, ru.m_log));
      }
      if (Q > qcore * (1.0 + 1e-12)) add_logx(+1.0, 2.0, Q - r);
    } else {
      // q in [0, t]: q = t*tau absorbs the kernel concentration.
      for (std::size_t i = 0; i < ru.inner->size(); ++i) {
        const double tau = ru.inner->nodes[i];
        const double kfac = std::pow(1.0 + tau * tau, -ns2);
        const MeanPair mp = mean(t * tau);
        const double wk = ru.inner->weights[i] * kfac;
        v += wk * mp.s;
        vr += wk * mp.sr;
        vt += wk * mp.s * (2.0 * sigma - (n + 2.0 * sigma) / (1.0 + tau * tau)) / t;
      }
      // q in [t, Q]
      if (Q > t * (1.0 + 1e-12)) {
        if (r <= 2.5) {
          // the log grading from t already resolves the unit scale at q ~ r
          add_rule(quad::log_rule(n - 1.0, t, Q, ru.m_log));
        } else {
          double q0 = t;
          const double qm = std::max(t, 0.5 * r);
          if (r - 2.0 > qm) {
            if (qm > q0 * (1.0 + 1e-12)) {
              add_rule(quad::log_rule(n - 1.0, q0, qm, ru.m_log));
              q0 = qm;
            }
            add_logx(-1.0, 2.0, r - q0);
            q0 = r - 2.0;
          } else if (r - 2.0 > q0 * (1.0 + 1e-12)) {
            add_rule(quad::log_rule(n - 1.0, q0, r - 2.0, ru.m_log));
            q0 = r - 2.0;
          }
          add_leg(q0, r + 2.0);
          add_logx(+1.0, 2.0, Q - r);
        }
      }
    }
    // q in [Q, inf): q = Q/tau, algebraic tail.
    const double tfac = std::pow(t / Q, 2.0 * sigma);
    for (std::size_t i = 0; i < ru.tail->size(); ++i) {
      const double tau = ru.tail->nodes[i];
      const double q = Q / tau;
      const double den = q * q + t * t;
      const double kfac =
          tfac * std::pow(1.0 + (t * tau / Q) * (t * tau / Q), -ns2);
      const MeanPair mp = mean(q);
      const double wk = ru.tail->weights[i] * kfac;
      v += wk * mp.s;
      vr += wk * mp.sr;
      vt += wk * mp.s * (2.0 * sigma / t - (n + 2.0 * sigma) * t / den);
    }
    return RadialExtensionValue{pker_ * v, pker_ * vr, pker_ * vt, 0.0};
  };

  RadialExtensionValue full =
      run({&geg_, &inner_, &tail_, opts_.m_q});
  RadialExtensionValue coarse =
      run({&geg_half_, &inner_half_, &tail_half_, 3 * opts_.m_q / 4 + 2});

  const double err = std::fabs(full.value - coarse.value);
  full.err_bound = err;
  if (err > opts_.rel_tol * std::fabs(full.value) + opts_.abs_tol)
    throw std::runtime_error(
        "SigmaExtension: unresolved kernel concentration (t below node resolution)");
  return full;
}

RadialExtensionValue SigmaExtension::eval_closed_form(double r, double t) const {
  return closed_form_half(params_, r, t);
}

RadialExtensionValue SigmaExtension::eval(double r, double t) const {
  if (t <= 0.0)
    throw std::invalid_argument("SigmaExtension: t > 0 required");
  if (bubble_profile_ && !opts_.force_quadrature &&
      std::fabs(params_.sigma - 0.5) < 1e-12)
    return eval_closed_form(r, t);
  return eval_quadrature(r, t);
}

ExtensionValue extend(const BubbleSpec& spec, const SigmaExtension& ext,
                      std::span<const double> x, double t) {
  const SobolevParams& params = ext.params();
  const double m = params.half_order();
  const double r = radius_from(spec, x);
  const double eps = spec.eps;

  RadialExtensionValue rv = ext.eval(r / eps, t / eps);
  const double vscale = std::pow(eps, -m);
  const double gscale = std::pow(eps, -m - 1.0);

  ExtensionValue out;
  out.value = vscale * rv.value;
  out.grad_t = gscale * rv.dt;
  out.quadrature_error_bound = vscale * rv.err_bound;
  out.grad_x.assign(x.size(), 0.0);
  if (r > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      double d = x[i] - (i < spec.x0.size() ? spec.x0[i] : 0.0);
      out.grad_x[i] = gscale * rv.dr * d / r;
    }
  }
  return out;
}

DecayEnvelope decay_envelope(const SobolevParams& params, double eps, double r,
                             double t) {
  const double m = params.half_order();
  const double d2 = eps * eps + r * r + t * t;
  if (d2 <= eps * eps * 1e-300)
    throw std::invalid_argument("decay_envelope: (x,t) must not be the origin");
  const double em = std::pow(eps, m);
  return {em * std::pow(d2, -m),
          em * std::pow(d2, -0.5 * (2.0 * m + 1.0)),
          em * std::pow(t, 2.0 * params.sigma - 1.0) * std::pow(d2, -0.5 * params.n)};
}

DecayEnvelope fit_envelope_constants(const SigmaExtension& ext, double r_max,
                                     double t_max, int samples) {
  const SobolevParams& p = ext.params();
  DecayEnvelope c{0.0, 0.0, 0.0};
  for (int i = 0; i < samples; ++i) {
    double r = r_max * (i + 0.5) / samples;
    for (int j = 0; j < samples; ++j) {
      double t = t_max * (j + 0.5) / samples;
      RadialExtensionValue v = ext.eval(r, t);
      DecayEnvelope env = decay_envelope(p, 1.0, r, t);
      c.w_bound = std::max(c.w_bound, std::fabs(v.value) / env.w_bound);
      c.gradx_bound = std::max(c.gradx_bound, std::fabs(v.dr) / env.gradx_bound);
      c.gradt_bound = std::max(c.gradt_bound, std::fabs(v.dt) / env.gradt_bound);
    }
  }
  return c;
}

}  // namespace wtrace::bubble
