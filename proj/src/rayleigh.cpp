#include "wtrace/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "wtrace/asymptotics.hpp"
#include "wtrace/constants.hpp"
#include "wtrace/kernels.hpp"
#include "wtrace/quadrature.hpp"

namespace wtrace::rayleigh {

using asymptotics::signed_power;

CylinderModel::CylinderModel(const SobolevParams& params, double L, double T,
                             GridSpec grid)
    : params_(params), L_(L), T_(T), grid_(grid), ndim_(params.n) {
  if (L <= 0.0 || T <= 0.0)
    throw std::invalid_argument("CylinderModel: positive L, T required");
  if (grid_.Jx < 2 || grid_.Jt < 2 || grid_.Jt % 2 != 0)
    throw std::invalid_argument("CylinderModel: need Jx >= 2 and even Jt >= 2");
  hx_ = L_ / grid_.Jx;
  nx_total_ = 1;
  for (int d = 0; d < ndim_; ++d) nx_total_ *= grid_.Jx;
  bvol_ = std::pow(hx_, ndim_);
  xstride_.resize(ndim_);
  std::size_t s = 1;
  for (int d = ndim_ - 1; d >= 0; --d) {
    xstride_[d] = s;
    s *= grid_.Jx;
  }

  const double sigma = params_.sigma;
  const double gamma = std::max(1.0, 2.0 / (2.0 - 2.0 * sigma));
  const int Jt = grid_.Jt;
  t_.resize(Jt + 1);
  for (int j = 0; j <= Jt / 2; ++j)
    t_[j] = 0.5 * T_ * std::pow(2.0 * j / Jt, gamma);
  for (int j = Jt / 2 + 1; j <= Jt; ++j) t_[j] = T_ - t_[Jt - j];

  // exact cell integrals of (t (T - t) / T)^{1 - 2 sigma}
  const double e = 1.0 - 2.0 * sigma;
  auto wfun = [&](double t) { return std::pow(t * (T_ - t) / T_, e); };
  wcell_.resize(Jt);
  for (int j = 0; j < Jt; ++j) {
    const double a = t_[j], b = t_[j + 1];
    if (std::fabs(e) < 1e-14) {
      wcell_[j] = b - a;
    } else if (j == 0) {
      quad::GaussRule rule = quad::power_rule(e, b, 16);
      wcell_[j] = rule.integrate(
          [&](double t) { return std::pow((T_ - t) / T_, e); });
    } else if (j == Jt - 1) {
      quad::GaussRule rule = quad::power_rule(e, T_ - a, 16);
      wcell_[j] = rule.integrate(
          [&](double s) { return std::pow((T_ - s) / T_, e); });
    } else {
      wcell_[j] = quad::legendre_rule(a, b, 16).integrate(wfun);
    }
  }
  wnode_.assign(Jt + 1, 0.0);
  for (int j = 0; j < Jt; ++j) {
    wnode_[j] += 0.5 * wcell_[j];
    wnode_[j + 1] += 0.5 * wcell_[j];
  }
}

double CylinderModel::dual_dt(int j) const {
  return 0.5 * (t_[j + 1] - t_[j - 1]);
}

namespace {

inline std::size_t x_neighbor(std::size_t xflat, std::size_t stride, int Jx) {
  const std::size_t c = (xflat / stride) % Jx;
  return c + 1 < static_cast<std::size_t>(Jx) ? xflat + stride
                                              : xflat - stride * (Jx - 1);
}

}  // namespace

double CylinderModel::energy(std::span<const double> u) const {
  const int Jt = grid_.Jt;
  const double hfac = std::pow(hx_, ndim_ - 2);
  double et = 0.0, ex = 0.0;
  for (std::size_t x = 0; x < nx_total_; ++x) {
    const std::size_t base = node(x, 0);
    for (int j = 0; j < Jt; ++j) {
      const double d = (u[base + j + 1] - u[base + j]) / (t_[j + 1] - t_[j]);
      et += wcell_[j] * d * d;
    }
  }
  et *= bvol_;
  for (int d = 0; d < ndim_; ++d) {
    const std::size_t stride = xstride_[d];
    for (std::size_t x = 0; x < nx_total_; ++x) {
      const std::size_t xn = x_neighbor(x, stride, grid_.Jx);
      const std::size_t a = node(x, 0), b = node(xn, 0);
      for (int j = 0; j <= Jt; ++j) {
        const double diff = u[b + j] - u[a + j];
        ex += wnode_[j] * diff * diff;
      }
    }
  }
  ex *= hfac;
  return et + ex;
}

void CylinderModel::apply_stiffness(std::span<const double> u,
                                    std::span<double> out) const {
  const int Jt = grid_.Jt;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t x = 0; x < nx_total_; ++x) {
    const std::size_t base = node(x, 0);
    for (int j = 0; j < Jt; ++j) {
      const double dt = t_[j + 1] - t_[j];
      const double c = bvol_ * wcell_[j] / (dt * dt);
      const double diff = u[base + j] - u[base + j + 1];
      out[base + j] += c * diff;
      out[base + j + 1] -= c * diff;
    }
  }
  const double hfac = std::pow(hx_, ndim_ - 2);
  for (int d = 0; d < ndim_; ++d) {
    const std::size_t stride = xstride_[d];
    for (std::size_t x = 0; x < nx_total_; ++x) {
      const std::size_t xn = x_neighbor(x, stride, grid_.Jx);
      const std::size_t a = node(x, 0), b = node(xn, 0);
      for (int j = 0; j <= Jt; ++j) {
        const double c = hfac * wnode_[j];
        const double diff = u[a + j] - u[b + j];
        out[a + j] += c * diff;
        out[b + j] -= c * diff;
      }
    }
  }
}

TraceIntegrals CylinderModel::trace_integrals(std::span<const double> u) const {
  const double p = params_.p;
  TraceIntegrals ti{0.0, 0.0, 0.0};
  for (std::size_t x = 0; x < nx_total_; ++x) {
    for (int j : {0, grid_.Jt}) {
      const double v = u[node(x, j)];
      ti.lp_norm_p += std::pow(std::fabs(v), p);
      ti.signed_mean += signed_power(v, p - 1.0);
      ti.l2 += v * v;
    }
  }
  ti.lp_norm_p *= bvol_;
  ti.signed_mean *= bvol_;
  ti.l2 *= bvol_;
  return ti;
}

double CylinderModel::raw_quotient(std::span<const double> u) const {
  const TraceIntegrals ti = trace_integrals(u);
  if (!(ti.lp_norm_p > 1e-280))
    throw std::runtime_error("raw_quotient: degenerate boundary trace");
  return energy(u) / std::pow(ti.lp_norm_p, 2.0 / params_.p);
}

namespace {

struct Objective {
  double value;
  double energy;
  TraceIntegrals traces;
};

Objective objective(const CylinderModel& model, double alpha,
                    std::span<const double> u) {
  const double p = model.params().p;
  Objective ob;
  ob.energy = model.energy(u);
  ob.traces = model.trace_integrals(u);
  if (!(ob.traces.lp_norm_p > 1e-280))
    throw std::runtime_error("I_alpha: degenerate boundary trace");
  const double q = 2.0 / (p - 1.0);
  ob.value = (ob.energy + alpha * std::pow(std::fabs(ob.traces.signed_mean), q)) /
             std::pow(ob.traces.lp_norm_p, 2.0 / p);
  return ob;
}

// gradient of I_alpha with respect to node values
void objective_gradient(const CylinderModel& model, double alpha,
                        std::span<const double> u, const Objective& ob,
                        std::span<double> grad) {
  const double p = model.params().p;
  const double q = 2.0 / (p - 1.0);
  model.apply_stiffness(u, grad);  // grad = A u
  const double m = ob.traces.signed_mean;
  const double P = ob.traces.lp_norm_p;
  const double D = std::pow(P, 2.0 / p);
  const double N = ob.value * D;
  // d/du of the penalty alpha |m|^q through m(u). For p > 3 the exponent
  // q < 1 makes |m|^{q-1} blow up at the constraint manifold; the
  // subgradient convention takes 0 inside a small dead zone.
  const double pen_fac =
      std::fabs(m) < 1e-12
          ? 0.0
          : alpha * q * std::pow(std::fabs(m), q - 1.0) * (m > 0.0 ? 1.0 : -1.0) *
                (p - 1.0);
  // d/du of D = P^{2/p}
  const double dD_fac = 2.0 * std::pow(P, 2.0 / p - 1.0);
  const double b = model.boundary_node_volume();
  kernels::scale(2.0 / D, grad);
  for (std::size_t x = 0; x < model.num_x(); ++x) {
    for (int j : {0, model.grid().Jt}) {
      const std::size_t i = model.node(x, j);
      const double v = u[i];
      const double abs_pm2 = std::fabs(v) < 1e-300
                                 ? 0.0
                                 : std::exp((p - 2.0) * std::log(std::fabs(v)));
      grad[i] += pen_fac * abs_pm2 * b / D -
                 (N / (D * D)) * dD_fac * signed_power(v, p - 1.0) * b;
    }
  }
}

void normalize_lp(const CylinderModel& model, std::vector<double>& u) {
  const TraceIntegrals ti = model.trace_integrals(u);
  if (!(ti.lp_norm_p > 1e-280))
    throw std::runtime_error("normalize: degenerate boundary trace");
  const double s = std::pow(ti.lp_norm_p, -1.0 / model.params().p);
  kernels::scale(s, u);
}

}  // namespace

double I_alpha_value(const CylinderModel& model, double alpha,
                     std::span<const double> u) {
  return objective(model, alpha, u).value;
}

MinimizeResult minimize_I_alpha(const CylinderModel& model, double alpha,
                                std::span<const double> u0, FlowOptions opts) {
  if (u0.size() != model.num_nodes())
    throw std::invalid_argument("minimize_I_alpha: field size mismatch");
  std::vector<double> u(u0.begin(), u0.end());
  normalize_lp(model, u);

  MinimizeResult res;
  std::vector<double> grad(u.size()), cand(u.size());
  Objective ob = objective(model, alpha, u);
  res.history.push_back(ob.value);
  double step = opts.init_step;
  for (int it = 0; it < opts.max_iters; ++it) {
    objective_gradient(model, alpha, u, ob, grad);
    const double g2 = kernels::norm2_sq(grad);
    if (!(g2 > 0.0)) break;
    step = std::min(2.0 * step, opts.init_step);
    bool accepted = false;
    Objective ob_new{};
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      std::copy(u.begin(), u.end(), cand.begin());
      kernels::axpy(-step, grad, cand);
      ob_new = objective(model, alpha, cand);
      if (ob_new.value <= ob.value - opts.armijo_c * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stationary to line-search resolution
    u.swap(cand);
    normalize_lp(model, u);
    ob = objective(model, alpha, u);
    res.history.push_back(ob.value);
    const double prev = res.history[res.history.size() - 2];
    if (prev - ob.value <= opts.rel_tol * std::fabs(prev)) break;
  }
  res.u = std::move(u);
  res.xi_alpha = res.history.back();
  return res;
}

std::vector<double> two_bubble_field(const CylinderModel& model, double eps) {
  const SobolevParams& params = model.params();
  const int n = params.n;
  const double L = model.length();
  const double m = params.half_order();
  const double amp = constants::bubble_amplitude(params);
  const int Jx = model.grid().Jx;
  const double hx = model.x_step();

  auto torus_dist2 = [&](std::size_t xflat, double center) {
    double d2 = 0.0;
    std::size_t rem = xflat;
    for (int d = 0; d < n; ++d) {
      std::size_t q = 1;
      for (int k = d + 1; k < n; ++k) q *= Jx;
      const double xd = static_cast<double>((rem / q) % Jx) * hx;
      double dd = std::fabs(xd - center);
      dd = std::min(dd, L - dd);
      d2 += dd * dd;
    }
    return d2;
  };
  auto bump = [&](double r2, double t) {
    const double den = (eps + t) * (eps + t) + r2;
    return amp * std::pow(eps / den, m);
  };

  std::vector<double> u(model.num_nodes());
  for (std::size_t x = 0; x < model.num_x(); ++x) {
    const double d1 = torus_dist2(x, 0.25 * L);
    const double d2 = torus_dist2(x, 0.75 * L);
    for (int j = 0; j < model.levels(); ++j) {
      const double t = model.t_node(j);
      u[model.node(x, j)] = bump(d1, t) - bump(d2, t);
    }
  }
  return u;
}

double constraint_shift(const CylinderModel& model, std::span<const double> u) {
  const double p = model.params().p;
  const double b = model.boundary_node_volume();
  auto mean = [&](double c) {
    double s = 0.0;
    for (std::size_t x = 0; x < model.num_x(); ++x)
      for (int j : {0, model.grid().Jt})
        s += signed_power(u[model.node(x, j)] - c, p - 1.0);
    return b * s;
  };
  double lo = *std::min_element(u.begin(), u.end()) - 1.0;
  double hi = *std::max_element(u.begin(), u.end()) + 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (std::fabs(hi) + std::fabs(lo) + 1.0);
       ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

MuEstimate mu_estimate(const CylinderModel& model, std::span<const double> alphas,
                       FlowOptions opts, std::span<const double> u0) {
  if (alphas.empty()) throw std::invalid_argument("mu_estimate: empty schedule");
  for (std::size_t i = 1; i < alphas.size(); ++i)
    if (alphas[i] <= alphas[i - 1])
      throw std::invalid_argument("mu_estimate: schedule must increase");

  std::vector<double> base =
      u0.empty() ? two_bubble_field(model, 8.0 * model.x_step())
                 : std::vector<double>(u0.begin(), u0.end());

  std::mt19937 rng(opts.seed);
  double amp = 0.0;
  for (double v : base) amp = std::max(amp, std::fabs(v));
  std::uniform_real_distribution<double> noise(-0.01 * amp, 0.01 * amp);

  MinimizeResult best;
  std::vector<double> best_hist;
  bool have_best = false;
  for (int r = 0; r < std::max(opts.restarts, 1); ++r) {
    std::vector<double> u = base;
    if (r > 0)
      for (double& v : u) v += noise(rng);
    MinimizeResult run;
    std::vector<double> hist;
    for (double alpha : alphas) {
      run = minimize_I_alpha(model, alpha, u, opts);
      u = run.u;
      hist.insert(hist.end(), run.history.begin(), run.history.end());
    }
    if (!have_best || run.xi_alpha < best.xi_alpha) {
      best = std::move(run);
      best_hist = std::move(hist);
      have_best = true;
    }
  }

  MuEstimate est;
  est.xi_alpha = best.xi_alpha;
  est.shift = constraint_shift(model, best.u);
  est.u = std::move(best.u);
  for (double& v : est.u) v -= est.shift;
  est.mu_hat = model.raw_quotient(est.u);
  est.history = std::move(best_hist);
  return est;
}

ElResidual el_residual(const CylinderModel& model, std::span<const double> u,
                       double mu_hat) {
  const double p = model.params().p;
  std::vector<double> au(u.size());
  model.apply_stiffness(u, au);
  const double b = model.boundary_node_volume();
  ElResidual res{0.0, 0.0};
  for (std::size_t x = 0; x < model.num_x(); ++x) {
    for (int j = 1; j < model.grid().Jt; ++j) {
      const double r =
          std::fabs(au[model.node(x, j)]) / (b * model.dual_dt(j));
      res.interior = std::max(res.interior, r);
    }
    for (int j : {0, model.grid().Jt}) {
      const std::size_t i = model.node(x, j);
      const double r =
          std::fabs(au[i] / b - mu_hat * signed_power(u[i], p - 1.0));
      res.boundary = std::max(res.boundary, r);
    }
  }
  return res;
}

void save_checkpoint(const std::string& path, const CylinderModel& model,
                     int iteration, double xi_alpha, std::span<const double> u) {
  nlohmann::json j;
  j["schema"] = "1";
  j["n"] = model.params().n;
  j["sigma"] = model.params().sigma;
  j["Jx"] = model.grid().Jx;
  j["Jt"] = model.grid().Jt;
  j["L"] = model.length();
  j["T"] = model.height();
  j["iteration"] = iteration;
  j["xi_alpha"] = xi_alpha;
  j["count"] = u.size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << j.dump() << '\n';
  out.write(reinterpret_cast<const char*>(u.data()),
            static_cast<std::streamsize>(u.size() * sizeof(double)));
  if (!out) throw std::runtime_error("save_checkpoint: write failure");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string header;
  std::getline(in, header);
  nlohmann::json j = nlohmann::json::parse(header);
  Checkpoint cp;
  cp.iteration = j.at("iteration").get<int>();
  cp.xi_alpha = j.at("xi_alpha").get<double>();
  const std::size_t count = j.at("count").get<std::size_t>();
  cp.u.resize(count);
  in.read(reinterpret_cast<char*>(cp.u.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw std::runtime_error("load_checkpoint: truncated data");
  return cp;
}

void write_history_csv(const std::string& path, std::span<const double> history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_history_csv: cannot open " + path);
  out << "iter,I_alpha\r\n";
  out.precision(17);
  for (std::size_t i = 0; i < history.size(); ++i)
    out << i << ',' << history[i] << "\r\n";
}

}  // namespace wtrace::rayleigh
