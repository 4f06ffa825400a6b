#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "wtrace/kernels.hpp"

using namespace wtrace::kernels;

TEST_CASE("weighted sums, small exact cases") {
  std::vector<double> w{1.0, 2.0, 3.0}, f{4.0, 5.0, 6.0};
  CHECK(weighted_sum(w, f) == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(dot(w, f) == doctest::Approx(32.0).epsilon(1e-15));
  CHECK(norm2_sq(w) == doctest::Approx(14.0).epsilon(1e-15));
  std::vector<double> c{1.0, 1.0, 2.0};
  CHECK(weighted_sum3(w, f, c) == doctest::Approx(4.0 + 10.0 + 36.0).epsilon(1e-15));
}

TEST_CASE("axpy and scale") {
  std::vector<double> x{1.0, 2.0, 3.0}, y{1.0, 1.0, 1.0};
  axpy(2.0, x, y);
  CHECK(y[0] == 3.0);
  CHECK(y[2] == 7.0);
  scale(0.5, y);
  CHECK(y[0] == 1.5);
}

TEST_CASE("vector backend agrees with scalar reference") {
  const Backend detected = detect_backend();
  if (detected == Backend::kScalar) {
    MESSAGE("no vector backend on this machine; scalar only");
    return;
  }
  std::mt19937 rng(424242u);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (std::size_t m : {1u, 2u, 3u, 4u, 7u, 8u, 31u, 64u, 67u, 255u}) {
    std::vector<double> a(m), b(m), c(m);
    for (std::size_t i = 0; i < m; ++i) {
      a[i] = dist(rng);
      b[i] = dist(rng);
      c[i] = dist(rng);
    }
    set_backend(Backend::kScalar);
    const double ws = weighted_sum(a, b);
    const double w3 = weighted_sum3(a, b, c);
    const double n2 = norm2_sq(a);
    std::vector<double> ys = c;
    axpy(0.7, a, ys);
    set_backend(detected);
    CHECK(weighted_sum(a, b) == doctest::Approx(ws).epsilon(1e-13));
    CHECK(weighted_sum3(a, b, c) == doctest::Approx(w3).epsilon(1e-13));
    CHECK(norm2_sq(a) == doctest::Approx(n2).epsilon(1e-13));
    std::vector<double> yv = c;
    axpy(0.7, a, yv);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(yv[i] == doctest::Approx(ys[i]).epsilon(1e-14));
    set_backend(detected);
  }
}

TEST_CASE("backend selection") {
  CHECK(backend_name(Backend::kScalar) == "scalar");
  set_backend(Backend::kScalar);
  CHECK(active_backend() == Backend::kScalar);
  set_backend(detect_backend());
}
