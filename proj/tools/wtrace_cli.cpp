// Command-line front end: each subcommand runs one batch computation and
// writes a versioned JSON report (plus CSV tables for sweeps) into --out.
// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wtrace/appendix.hpp"
#include "wtrace/asymptotics.hpp"
#include "wtrace/bubble.hpp"
#include "wtrace/constants.hpp"
#include "wtrace/geometry.hpp"
#include "wtrace/kernels.hpp"
#include "wtrace/rayleigh.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct CommonOpts {
  int n = 3;
  double sigma = 0.5;
  std::string out_dir = ".";
  double tol = 1e-6;
  int threads = 0;
  unsigned seed = 1u;
};

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("TRACE_SHARP_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void write_report(const std::string& out_dir, const std::string& name,
                  ordered_json& j) {
  j["schema"] = "1";
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / (name + ".json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
  std::cout << path.string() << '\n';
}

ordered_json report_head(const CommonOpts& c, const std::string& command) {
  ordered_json j;
  j["schema"] = "1";
  j["command"] = command;
  j["n"] = c.n;
  j["sigma"] = c.sigma;
  j["seed"] = c.seed;
  return j;
}

int run_constants(const CommonOpts& c) {
  wtrace::SobolevParams params(c.n, c.sigma);
  wtrace::constants::ConstantSet set = wtrace::constants::evaluate(params);
  ordered_json j = report_head(c, "constants");
  j["S"] = set.S;
  j["kappa"] = set.kappa;
  j["alpha"] = set.alpha;
  j["p_kernel"] = set.pker;
  j["p_exponent"] = params.p;
  j["bubble_energy"] = wtrace::constants::bubble_energy(params);
  j["boundary_lp"] = wtrace::constants::bubble_boundary_lp(params);
  if (std::isfinite(set.A0_ratio)) j["A0_ratio"] = set.A0_ratio;
  write_report(c.out_dir, "constants", j);
  return 0;
}

int run_verify_appendix(const CommonOpts& c) {
  wtrace::SobolevParams params(c.n, c.sigma);
  wtrace::appendix::Oracle oracle(params);
  ordered_json j = report_head(c, "verify-appendix");
  j["A0"] = oracle.A0();
  j["A0_tail_bound"] = oracle.A0_tail_bound();
  j["A0_closed_form"] = wtrace::constants::a0_closed_form(params);
  ordered_json reports = ordered_json::array();
  bool ok = true;
  for (auto which : {wtrace::appendix::Identity::kX2FullGrad,
                     wtrace::appendix::Identity::kFullGrad,
                     wtrace::appendix::Identity::kT3XGrad,
                     wtrace::appendix::Identity::kT3FullGrad}) {
    wtrace::appendix::IdentityReport rep = oracle.verify(which);
    ordered_json r;
    r["identity"] = wtrace::appendix::identity_name(which);
    r["lhs"] = rep.lhs;
    r["rhs"] = rep.rhs;
    r["rel_err"] = rep.rel_err;
    r["tail_bound"] = rep.tail_bound;
    r["tail_flagged"] = rep.tail_flagged;
    reports.push_back(r);
    ok = ok && rep.rel_err <= std::max(c.tol, 1e-2);
  }
  j["identities"] = reports;
  j["all_within_tolerance"] = ok;
  write_report(c.out_dir, "verify-appendix", j);
  return 0;
}

int run_bubble_check(const CommonOpts& c) {
  wtrace::SobolevParams params(c.n, c.sigma);
  wtrace::bubble::SigmaExtension ext(params);

  // kernel normalization: the extension of the constant 1 is 1
  wtrace::bubble::SigmaExtension unit(
      params, [](double) { return 1.0; }, [](double) { return 0.0; });
  double norm_err = 0.0;
  std::mt19937 rng(c.seed);
  std::uniform_real_distribution<double> ur(0.0, 3.0), ut(0.05, 3.0);
  ordered_json samples = ordered_json::array();
  for (int i = 0; i < 16; ++i) {
    const double r = ur(rng), t = ut(rng);
    const double v = unit.eval_quadrature(r, t).value;
    norm_err = std::max(norm_err, std::fabs(v - 1.0));
  }

  // closed form against kernel quadrature at sigma = 1/2
  double closed_err = 0.0;
  if (std::fabs(c.sigma - 0.5) < 1e-12) {
    for (int i = 0; i < 16; ++i) {
      const double r = ur(rng), t = ut(rng);
      const auto quadv = ext.eval_quadrature(r, t);
      const auto close = wtrace::bubble::closed_form_half(params, r, t);
      closed_err = std::max(closed_err,
                            std::fabs(quadv.value - close.value) /
                                std::fabs(close.value));
      ordered_json s;
      s["r"] = r;
      s["t"] = t;
      s["quadrature"] = quadv.value;
      s["closed_form"] = close.value;
      samples.push_back(s);
    }
  }

  wtrace::bubble::DecayEnvelope env =
      wtrace::bubble::fit_envelope_constants(ext, 6.0, 6.0, 10);

  ordered_json j = report_head(c, "bubble-check");
  j["normalization_max_err"] = norm_err;
  if (std::fabs(c.sigma - 0.5) < 1e-12) {
    j["closed_form_max_rel_err"] = closed_err;
    j["closed_form_samples"] = samples;
  }
  j["envelope_constants"] = {{"value", env.w_bound},
                             {"grad_x", env.gradx_bound},
                             {"grad_t", env.gradt_bound}};
  write_report(c.out_dir, "bubble-check", j);
  return 0;
}

int run_geometry(const CommonOpts& c, const std::string& curvature_path) {
  if (curvature_path.empty())
    throw std::invalid_argument("geometry: --curvature <path.json> is required");
  wtrace::geometry::CurvatureData data =
      wtrace::geometry::load_json_file(curvature_path);
  wtrace::SobolevParams params(data.n, c.sigma);

  ordered_json j = report_head(c, "geometry");
  j["n"] = data.n;
  j["H"] = data.H;
  j["pi_norm_sq"] = data.pi_norm_sq();
  j["Rbar_scalar"] = data.Rbar_scalar;
  j["Rtt"] = data.Rtt;
  j["validity_radius"] = wtrace::geometry::validity_radius(data);
  j["curvature_condition"] = wtrace::geometry::curvature_condition(
      params, data.Rbar_scalar, data.pi_norm_sq(), data.Rtt);

  std::vector<double> x(data.n, 0.0);
  x[0] = 0.1;
  wtrace::geometry::MetricSample ms = wtrace::geometry::metric_sample(data, x, 0.1);
  j["sample"] = {{"x1", 0.1},
                 {"t", 0.1},
                 {"sqrt_det", ms.sqrt_det},
                 {"g_inv_00", ms.g_inv(0, 0)}};
  write_report(c.out_dir, "geometry", j);
  return 0;
}

int run_sweep(const CommonOpts& c, const std::string& curvature_path,
              double eps_min, double eps_max, double delta) {
  wtrace::SobolevParams params(c.n, c.sigma);
  wtrace::geometry::CurvatureData data =
      curvature_path.empty() ? wtrace::geometry::CurvatureData::zero(c.n)
                             : wtrace::geometry::load_json_file(curvature_path);
  wtrace::asymptotics::Model model(params, data,
                                   wtrace::asymptotics::CutoffSpec(delta));

  std::vector<double> eps_values;
  for (double e = eps_max; e >= eps_min * (1.0 - 1e-12); e *= 0.5)
    eps_values.push_back(e);
  if (eps_values.size() < 2)
    throw std::invalid_argument("sweep: need eps-max >= 2 * eps-min");

  std::vector<wtrace::asymptotics::SweepRow> rows = model.sweep(eps_values);

  fs::create_directories(c.out_dir);
  const fs::path csv_path = fs::path(c.out_dir) / "sweep.csv";
  {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
    csv.precision(17);
    csv << "eps,mu_eps,I1,I2,boundary_lp,quotient\r\n";
    for (const auto& row : rows)
      csv << row.eps << ',' << row.mu_eps << ',' << row.I1 << ',' << row.I2
          << ',' << row.boundary_lp << ',' << row.quotient << "\r\n";
  }

  std::vector<double> eps, mu, quot;
  for (const auto& row : rows) {
    eps.push_back(row.eps);
    mu.push_back(row.mu_eps);
    quot.push_back(row.quotient);
  }
  const double mu_slope = wtrace::asymptotics::fit_loglog_slope(eps, mu);
  const double mu_slope_pred =
      std::pow(c.n - 2.0 * c.sigma, 2) / (2.0 * (c.n + 2.0 * c.sigma));

  ordered_json j = report_head(c, "sweep");
  j["delta"] = delta;
  j["eps_min"] = eps_min;
  j["eps_max"] = eps_max;
  j["V_ext"] = model.exterior_volume();
  j["S_inv"] = 1.0 / wtrace::constants::sharp_constant(params);
  j["mu_eps_loglog_slope"] = mu_slope;
  j["mu_eps_slope_predicted"] = mu_slope_pred;
  j["quotient_eps_slope"] = wtrace::asymptotics::fit_linear_slope(eps, quot);
  ordered_json table = ordered_json::array();
  for (const auto& row : rows) {
    ordered_json r;
    r["eps"] = row.eps;
    r["mu_eps"] = row.mu_eps;
    r["I1"] = row.I1;
    r["I2"] = row.I2;
    r["boundary_lp"] = row.boundary_lp;
    r["quotient"] = row.quotient;
    table.push_back(r);
  }
  j["rows"] = table;
  write_report(c.out_dir, "sweep", j);
  std::cout << csv_path.string() << '\n';
  return 0;
}

int run_mu(const CommonOpts& c, const std::string& grid_spec,
           const std::string& alpha_schedule) {
  wtrace::SobolevParams params(c.n, c.sigma);
  wtrace::rayleigh::GridSpec grid;
  if (!grid_spec.empty()) {
    std::istringstream ss(grid_spec);
    char comma = ',';
    if (!(ss >> grid.Jx >> comma >> grid.Jt) || comma != ',')
      throw std::invalid_argument("mu: --grid expects Jx,Jt");
  }
  std::vector<double> alphas;
  {
    std::istringstream ss(alpha_schedule);
    std::string tok;
    while (std::getline(ss, tok, ',')) alphas.push_back(std::stod(tok));
  }
  if (alphas.empty()) throw std::invalid_argument("mu: empty --alpha-schedule");

  wtrace::rayleigh::CylinderModel model(params, 1.0, 1.0, grid);
  wtrace::rayleigh::FlowOptions opts;
  opts.seed = c.seed;
  wtrace::rayleigh::MuEstimate est =
      wtrace::rayleigh::mu_estimate(model, alphas, opts);
  wtrace::rayleigh::ElResidual res =
      wtrace::rayleigh::el_residual(model, est.u, est.mu_hat);

  fs::create_directories(c.out_dir);
  wtrace::rayleigh::save_checkpoint(
      (fs::path(c.out_dir) / "mu_minimizer.ckpt").string(), model, 0,
      est.xi_alpha, est.u);
  {
    const fs::path csv_path = fs::path(c.out_dir) / "descent.csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open " + csv_path.string());
    csv.precision(17);
    csv << "iter,I_alpha\r\n";
    for (std::size_t i = 0; i < est.history.size(); ++i)
      csv << i << ',' << est.history[i] << "\r\n";
  }

  ordered_json j = report_head(c, "mu");
  j["grid"] = {{"Jx", grid.Jx}, {"Jt", grid.Jt}};
  j["alphas"] = alphas;
  j["mu_hat"] = est.mu_hat;
  j["xi_alpha"] = est.xi_alpha;
  j["projection_shift"] = est.shift;
  j["el_residual_interior"] = res.interior;
  j["el_residual_boundary"] = res.boundary;
  j["S_inv"] = 1.0 / wtrace::constants::sharp_constant(params);
  write_report(c.out_dir, "mu", j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Numerical toolkit for the weighted trace inequality: sharp constants, "
      "kernel extensions, weighted-integral identities, Fermi-coordinate "
      "energy sweeps, and discrete quotient minimization.\n"
      "CSV outputs: sweep.csv has columns eps,mu_eps,I1,I2,boundary_lp,"
      "quotient; descent histories have columns iter,I_alpha."};
  app.require_subcommand(1);

  CommonOpts c;
  std::string curvature_path, grid_spec = "64,64", alpha_schedule = "1,10,100";
  double eps_min = 1.0 / 512.0, eps_max = 1.0 / 16.0, delta = 0.25;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--n", c.n, "boundary dimension");
    cmd->add_option("--sigma", c.sigma, "order parameter in (0,1)");
    cmd->add_option("--out", c.out_dir, "output directory");
    cmd->add_option("--tol", c.tol, "tolerance for pass/fail summaries");
    cmd->add_option("--threads", c.threads,
                    "worker threads (fallback: TRACE_SHARP_THREADS)");
    cmd->add_option("--seed", c.seed, "RNG seed for sampled checks");
  };

  CLI::App* constants = app.add_subcommand("constants", "closed-form constants");
  add_common(constants);
  CLI::App* appendix = app.add_subcommand("verify-appendix",
                                          "weighted-integral identity checks");
  add_common(appendix);
  CLI::App* bubble = app.add_subcommand("bubble-check",
                                        "extension kernel verification");
  add_common(bubble);
  CLI::App* geometry = app.add_subcommand("geometry",
                                          "curvature data inspection");
  add_common(geometry);
  geometry->add_option("--curvature", curvature_path, "curvature JSON file");
  CLI::App* sweep = app.add_subcommand("sweep", "concentration-model sweep");
  add_common(sweep);
  sweep->add_option("--curvature", curvature_path, "curvature JSON file");
  sweep->add_option("--eps-min", eps_min, "smallest concentration scale");
  sweep->add_option("--eps-max", eps_max, "largest concentration scale");
  sweep->add_option("--delta", delta, "cutoff inner radius");
  CLI::App* mu = app.add_subcommand("mu", "discrete quotient minimization");
  add_common(mu);
  mu->add_option("--grid", grid_spec, "grid as Jx,Jt");
  mu->add_option("--alpha-schedule", alpha_schedule,
                 "comma-separated increasing penalty weights");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  c.threads = resolve_threads(c.threads);

  try {
    if (constants->parsed()) return run_constants(c);
    if (appendix->parsed()) return run_verify_appendix(c);
    if (bubble->parsed()) return run_bubble_check(c);
    if (geometry->parsed()) return run_geometry(c, curvature_path);
    if (sweep->parsed())
      return run_sweep(c, curvature_path, eps_min, eps_max, delta);
    if (mu->parsed()) return run_mu(c, grid_spec, alpha_schedule);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
