#pragma once

#include <span>
#include <string>
#include <vector>

#include "wtrace/params.hpp"

namespace wtrace::rayleigh {

struct GridSpec {
  int Jx = 64;  // periodic cells per boundary direction
  int Jt = 64;  // graded cells across the cylinder height (even)
};

struct TraceIntegrals {
  double lp_norm_p;    // int_{boundary} |u|^p
  double signed_mean;  // int_{boundary} |u|^{p-2} u
  double l2;           // int_{boundary} u^2
};

// Flat periodic cylinder T^n x [0, T] with defining function
// rho(t) = t (T - t) / T and weight rho^{1-2 sigma}. The t-mesh is graded
// toward both ends (t_j = T/2 (2j/Jt)^gamma mirrored,
// gamma = max(1, 2/(2-2 sigma))); per-cell weight integrals are computed
// with degenerate-exponent quadrature, so the face weights are exact cell
// integrals of the weight.
class CylinderModel {
 public:
  CylinderModel(const SobolevParams& params, double L, double T,
                GridSpec grid = {});

  std::size_t num_nodes() const { return nx_total_ * (grid_.Jt + 1); }
  std::size_t num_x() const { return nx_total_; }
  int levels() const { return grid_.Jt + 1; }
  double t_node(int j) const { return t_[j]; }
  double x_step() const { return hx_; }
  double boundary_node_volume() const { return bvol_; }
  const SobolevParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }
  double length() const { return L_; }
  double height() const { return T_; }

  // node index: flattened x times level, column-major in t
  std::size_t node(std::size_t xflat, int j) const {
    return xflat * (grid_.Jt + 1) + j;
  }

  // weighted Dirichlet energy int rho^{1-2s} |grad u|^2
  double energy(std::span<const double> u) const;

  // out = A u where energy(u) = u^T A u
  void apply_stiffness(std::span<const double> u, std::span<double> out) const;

  TraceIntegrals trace_integrals(std::span<const double> u) const;

  // energy / lp_norm_p^{2/p}
  double raw_quotient(std::span<const double> u) const;

  // interior dual t-spacing (t_{j+1} - t_{j-1})/2 for residual scaling
  double dual_dt(int j) const;

 private:
  friend struct StencilAccess;
  SobolevParams params_;
  double L_, T_, hx_, bvol_;
  GridSpec grid_;
  int ndim_;
  std::size_t nx_total_;
  std::vector<double> t_;        // Jt+1 node positions
  std::vector<double> wcell_;    // Jt cell integrals of rho^{1-2s}
  std::vector<double> wnode_;    // Jt+1 dual weights (half-cell sums)
  std::vector<std::size_t> xstride_;
};

struct FlowOptions {
  int max_iters = 400;
  double rel_tol = 1e-9;      // stop when relative I decrease falls below
  double armijo_c = 1e-4;
  int max_backtracks = 50;
  double init_step = 1.0;
  int restarts = 1;
  unsigned seed = 20240817u;
};

struct MinimizeResult {
  std::vector<double> u;          // lp-normalized minimizer
  double xi_alpha;
  std::vector<double> history;    // monotone nonincreasing I_alpha values
};

// I_alpha(u) = (energy + alpha |signed_mean|^{2/(p-1)}) / lp_norm_p^{2/p}
double I_alpha_value(const CylinderModel& model, double alpha,
                     std::span<const double> u);

// Projected-gradient descent with Armijo backtracking; the iterate is
// renormalized to int |u|^p = 1 after every step (I_alpha is
// scale-invariant). Throws on degenerate boundary trace.
MinimizeResult minimize_I_alpha(const CylinderModel& model, double alpha,
                                std::span<const double> u0,
                                FlowOptions opts = {});

// Antisymmetric two-bubble competitor: difference of bubble traces extended
// into the cylinder, centered at antipodal torus points; its signed mean
// vanishes by symmetry when Jx is even.
std::vector<double> two_bubble_field(const CylinderModel& model, double eps);

// Constant c with signed_mean(u - c) = 0 (strictly decreasing in c).
double constraint_shift(const CylinderModel& model, std::span<const double> u);

struct MuEstimate {
  double mu_hat;            // raw quotient of the projected minimizer
  double xi_alpha;          // penalized value at the largest alpha
  double shift;             // constant subtracted by the projection
  std::vector<double> u;    // projected minimizer
  std::vector<double> history;  // concatenated descent values of the best run
};

// Continuation over an increasing alpha schedule with warm starts (optional
// random restarts keep the best), followed by projection into the
// zero-signed-mean class; mu_hat is an upper bound for the discrete
// infimum.
MuEstimate mu_estimate(const CylinderModel& model, std::span<const double> alphas,
                       FlowOptions opts = {}, std::span<const double> u0 = {});

struct ElResidual {
  double interior;  // max |div(rho^{1-2s} grad u)| over interior nodes
  double boundary;  // max |weighted flux - mu |u|^{p-2} u| over trace nodes
};

ElResidual el_residual(const CylinderModel& model, std::span<const double> u,
                       double mu_hat);

// Checkpoint: one JSON header line (model shape, iteration, xi_alpha)
// followed by the node values as raw little-endian 64-bit floats in node
// index order.
void save_checkpoint(const std::string& path, const CylinderModel& model,
                     int iteration, double xi_alpha, std::span<const double> u);
struct Checkpoint {
  int iteration;
  double xi_alpha;
  std::vector<double> u;
};
Checkpoint load_checkpoint(const std::string& path);

// RFC-4180 CSV with header "iter,I_alpha".
void write_history_csv(const std::string& path, std::span<const double> history);

}  // namespace wtrace::rayleigh
