#include "wtrace/geometry.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace wtrace::geometry {

using nlohmann::json;

double SymMatrix::trace() const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i * n + i];
  return s;
}

double SymMatrix::frob_sq() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

bool SymMatrix::is_symmetric(double tol) const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs((*this)(i, j) - (*this)(j, i)) > tol) return false;
  return true;
}

CurvatureData CurvatureData::zero(int n) {
  CurvatureData d;
  d.n = n;
  d.pi = SymMatrix(n);
  d.Rbar_ric = SymMatrix(n);
  d.Ritjt = SymMatrix(n);
  d.Hgrad.assign(n, 0.0);
  return d;
}

namespace {

// Riem4 stored as T[i][k][l][j]; the underlying curvature slots are
// A(i,k,j,l) = T[i][k][l][j].
inline double riem(const std::vector<double>& T, int n, int i, int k, int j, int l) {
  return T[((static_cast<std::size_t>(i) * n + k) * n + l) * n + j];
}

}  // namespace

void CurvatureData::validate(double tol) const {
  if (n < 2) throw std::invalid_argument("CurvatureData: n >= 2 required");
  auto expect_shape = [&](const SymMatrix& m, const char* name) {
    if (m.n != n || static_cast<int>(m.a.size()) != n * n)
      throw std::invalid_argument(std::string("CurvatureData: bad shape for ") + name);
    if (!m.is_symmetric(tol))
      throw std::invalid_argument(std::string("CurvatureData: ") + name +
                                  " not symmetric");
  };
  expect_shape(pi, "pi");
  expect_shape(Rbar_ric, "Rbar_ric");
  expect_shape(Ritjt, "Ritjt");
  if (static_cast<int>(Hgrad.size()) != n)
    throw std::invalid_argument("CurvatureData: bad shape for Hgrad");
  if (std::fabs(pi.trace() - H) > tol)
    throw std::invalid_argument("CurvatureData: trace(pi) != H");
  if (std::fabs(Rbar_ric.trace() - Rbar_scalar) > tol)
    throw std::invalid_argument("CurvatureData: trace(Rbar_ric) != Rbar_scalar");
  if (!g_tm.empty()) {
    if (static_cast<int>(g_tm.size()) != n * n * n)
      throw std::invalid_argument("CurvatureData: bad shape for g_tm");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
          if (std::fabs(g_tm[(i * n + j) * n + m] - g_tm[(j * n + i) * n + m]) > tol)
            throw std::invalid_argument("CurvatureData: g_tm not symmetric in (i,j)");
  }
  if (!Riem4.empty()) {
    const std::size_t n4 = static_cast<std::size_t>(n) * n * n * n;
    if (Riem4.size() != n4)
      throw std::invalid_argument("CurvatureData: bad shape for Riem4");
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) {
            const double v = riem(Riem4, n, i, k, j, l);
            if (std::fabs(v + riem(Riem4, n, k, i, j, l)) > tol ||
                std::fabs(v + riem(Riem4, n, i, k, l, j)) > tol ||
                std::fabs(v - riem(Riem4, n, j, l, i, k)) > tol)
              throw std::invalid_argument(
                  "CurvatureData: Riem4 violates curvature pair symmetries");
          }
  }
}

double sqrt_det_g(const CurvatureData& data, std::span<const double> x, double t) {
  const int n = data.n;
  double v = 1.0 - data.H * t +
             0.5 * (data.H * data.H - data.pi_norm_sq() - data.Rtt) * t * t;
  double hx = 0.0, rxx = 0.0;
  for (int i = 0; i < n; ++i) {
    hx += data.Hgrad[i] * x[i];
    for (int j = 0; j < n; ++j) rxx += data.Rbar_ric(i, j) * x[i] * x[j];
  }
  return v - hx * t - rxx / 6.0;
}

SymMatrix g_inverse(const CurvatureData& data, std::span<const double> x, double t) {
  const int n = data.n;
  SymMatrix g(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 2.0 * data.pi(i, j) * t;
      double pp = 0.0;
      for (int m = 0; m < n; ++m) pp += data.pi(i, m) * data.pi(m, j);
      v += (3.0 * pp + data.Ritjt(i, j)) * t * t;
      if (!data.Riem4.empty()) {
        double rxx = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            rxx += riem(data.Riem4, n, i, k, j, l) * x[k] * x[l];
        v -= rxx / 3.0;
      }
      if (!data.g_tm.empty()) {
        double gm = 0.0;
        for (int m = 0; m < n; ++m) gm += data.g_tm[(i * n + j) * n + m] * x[m];
        v += gm * t;
      }
      g(i, j) += v;
    }
  return g;
}

MetricSample metric_sample(const CurvatureData& data, std::span<const double> x,
                           double t) {
  return {sqrt_det_g(data, x, t), g_inverse(data, x, t), 2};
}

double validity_radius(const CurvatureData& data, double cap) {
  const int n = data.n;
  std::mt19937 rng(12345u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double radius = cap;
  std::vector<double> d(n + 1);
  for (int trial = 0; trial < 256; ++trial) {
    double norm = 0.0;
    for (int i = 0; i <= n; ++i) {
      d[i] = gauss(rng);
      norm += d[i] * d[i];
    }
    norm = std::sqrt(norm);
    for (double& v : d) v /= norm;
    d[n] = std::fabs(d[n]);  // t >= 0 half-space
    // sqrt|g| along the ray is 1 + b rho + c rho^2
    const double dt = d[n];
    double b = -data.H * dt;
    double c = 0.5 * (data.H * data.H - data.pi_norm_sq() - data.Rtt) * dt * dt;
    for (int i = 0; i < n; ++i) {
      c -= data.Hgrad[i] * d[i] * dt;
      for (int j = 0; j < n; ++j) c -= data.Rbar_ric(i, j) * d[i] * d[j] / 6.0;
    }
    // smallest positive root of 1 + b rho + c rho^2
    double root = std::numeric_limits<double>::infinity();
    if (std::fabs(c) < 1e-300) {
      if (b < 0.0) root = -1.0 / b;
    } else {
      const double disc = b * b - 4.0 * c;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        for (double r : {(-b - sq) / (2.0 * c), (-b + sq) / (2.0 * c)})
          if (r > 0.0) root = std::min(root, r);
      }
    }
    radius = std::min(radius, root);
  }
  return radius;
}

double curvature_condition(const SobolevParams& params, double Rbar_scalar,
                           double pi_norm2, double Rtt) {
  const double n = params.n;
  const double s = params.sigma;
  if (n - 2.0 - 2.0 * s <= 0.0)
    throw std::invalid_argument("curvature_condition: requires n > 2 sigma + 2");
  const double cr = (3.0 * n * n - 6.0 * n - 4.0 * s * s + 4.0) /
                    (12.0 * (1.0 - s) * (n - 1.0) * (n - 2.0 - 2.0 * s));
  const double ct = (3.0 * n - 2.0 - 2.0 * s) / (3.0 * n - 6.0 - 6.0 * s);
  return cr * Rbar_scalar + pi_norm2 + ct * Rtt;
}

namespace {

json matrix_to_json(const SymMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n; ++i) {
    json row = json::array();
    for (int j = 0; j < m.n; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

SymMatrix matrix_from_json(const json& j, int n, const char* name) {
  SymMatrix m(n);
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw std::invalid_argument(std::string("geometry JSON: bad matrix ") + name);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(j[i].size()) != n)
      throw std::invalid_argument(std::string("geometry JSON: bad matrix row ") + name);
    for (int k = 0; k < n; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

std::vector<double> flat_from_json(const json& j, std::size_t expect,
                                   const char* name) {
  std::vector<double> out;
  out.reserve(expect);
  // accept either a flat row-major array or nested arrays
  std::function<void(const json&)> walk = [&](const json& node) {
    if (node.is_array())
      for (const auto& c : node) walk(c);
    else
      out.push_back(node.get<double>());
  };
  walk(j);
  if (out.size() != expect)
    throw std::invalid_argument(std::string("geometry JSON: bad shape for ") + name);
  return out;
}

}  // namespace

std::string to_json(const CurvatureData& data) {
  json j;
  j["n"] = data.n;
  j["H"] = data.H;
  j["pi"] = matrix_to_json(data.pi);
  j["Rbar_ric"] = matrix_to_json(data.Rbar_ric);
  j["Rbar_scalar"] = data.Rbar_scalar;
  j["Rtt"] = data.Rtt;
  j["Ritjt"] = matrix_to_json(data.Ritjt);
  j["Hgrad"] = data.Hgrad;
  if (!data.g_tm.empty()) j["g_tm"] = data.g_tm;        // flat [i][j][m] row-major
  if (!data.Riem4.empty()) j["Riem4"] = data.Riem4;     // flat [i][k][l][j] row-major
  return j.dump(2);
}

CurvatureData from_json(const std::string& text) {
  json j = json::parse(text);
  const int n = j.at("n").get<int>();
  CurvatureData d = CurvatureData::zero(n);
  d.H = j.value("H", 0.0);
  if (j.contains("pi")) d.pi = matrix_from_json(j["pi"], n, "pi");
  if (j.contains("Rbar_ric")) d.Rbar_ric = matrix_from_json(j["Rbar_ric"], n, "Rbar_ric");
  d.Rbar_scalar = j.value("Rbar_scalar", 0.0);
  d.Rtt = j.value("Rtt", 0.0);
  if (j.contains("Ritjt")) d.Ritjt = matrix_from_json(j["Ritjt"], n, "Ritjt");
  if (j.contains("Hgrad")) d.Hgrad = flat_from_json(j["Hgrad"], n, "Hgrad");
  if (j.contains("g_tm"))
    d.g_tm = flat_from_json(j["g_tm"], static_cast<std::size_t>(n) * n * n, "g_tm");
  if (j.contains("Riem4"))
    d.Riem4 = flat_from_json(j["Riem4"], static_cast<std::size_t>(n) * n * n * n,
                             "Riem4");
  d.validate();
  return d;
}

CurvatureData load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("geometry: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace wtrace::geometry
