#include "lightcone/errors.hpp"
#include "lightcone/periodic.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lightcone;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("spectral derivatives of trigonometric polynomials") {
  PeriodicGrid g(64, 2 * pi);
  auto f = GridFunction::sample(g, [](double x) { return std::sin(3 * x) + 0.5 * std::cos(x); });
  auto d1 = derivative(f, 1);
  auto d3 = derivative(f, 3);
  auto e1 = GridFunction::sample(g, [](double x) { return 3 * std::cos(3 * x) - 0.5 * std::sin(x); });
  auto e3 = GridFunction::sample(g, [](double x) { return -27 * std::cos(3 * x) + 0.5 * std::sin(x); });
  CHECK((d1 - e1).max_abs() < 1e-12);
  CHECK((d3 - e3).max_abs() < 1e-10);
}

TEST_CASE("fd4 converges at fourth order") {
  auto err = [](int n) {
    PeriodicGrid g(n, 2 * pi);
    auto f = GridFunction::sample(g, [](double x) { return std::exp(std::sin(x)); });
    auto e = GridFunction::sample(g, [](double x) { return std::cos(x) * std::exp(std::sin(x)); });
    return (derivative(f, 1, DiffMethod::fd4) - e).max_abs();
  };
  double r = err(64) / err(128);
  CHECK(r > 12);
  CHECK(r < 20);
}

TEST_CASE("other length and jets") {
  PeriodicGrid g(128, 40.0);
  double k = 2 * pi / 40.0;
  auto f = GridFunction::sample(g, [&](double x) { return std::cos(2 * k * x); });
  auto jet = derivative_jet(f.values, 40.0, 4, DiffMethod::spectral);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(jet[4][j] - std::pow(2 * k, 4) * f[j]) < 1e-10);
}

TEST_CASE("quadrature, inner products and shifts") {
  PeriodicGrid g(32, 2 * pi);
  auto c = GridFunction::sample(g, [](double x) { return std::cos(x); });
  CHECK(inner(c, c) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(std::abs(integrate(c)) < 1e-14);
  auto s = fourier_shift(c.values, 2 * pi, 0.3);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(s[j] - std::cos(g.node(j) + 0.3)) < 1e-13);
  auto a = periodic_antiderivative(c.values, 2 * pi);
  for (int j = 0; j < g.size(); ++j) CHECK(std::abs(a[j] - std::sin(g.node(j))) < 1e-13);
}

TEST_CASE("spectral resolution diagnostics") {
  std::vector<double> smooth(64), rough(64);
  for (int j = 0; j < 64; ++j) {
    smooth[j] = std::sin(2 * pi * j / 64);
    rough[j] = (j % 2) ? 1.0 : -1.0;
  }
  CHECK(spectrum_resolved(smooth));
  CHECK_FALSE(spectrum_resolved(rough));
  Warnings w;
  derivative(GridFunction(PeriodicGrid(64, 2 * pi), rough), 1, DiffMethod::spectral, &w);
  CHECK_FALSE(w.items.empty());
}

TEST_CASE("operator trees") {
  PeriodicGrid g(64, 2 * pi);
  auto k = GridFunction::sample(g, [](double x) { return 1 + 0.3 * std::cos(x); });
  using Op = LinearPeriodicOperator;
  auto op = Op::D() * Op::multiply(k) + Op::multiply(k) * Op::D();  // skew-adjoint
  CHECK(adjoint_residual(op, g, 5, 1) < 1e-12);
  auto sym = Op::D() * Op::D();
  CHECK(adjoint_residual(sym, g, 5, 1) > 1e-2);
  CHECK(Op::zero().is_zero());
  auto f = GridFunction::sample(g, [](double x) { return std::sin(x); });
  CHECK((Op::D().apply(f) - GridFunction::sample(g, [](double x) { return std::cos(x); })).max_abs() < 1e-13);
}

TEST_CASE("grid mismatch is an error") {
  GridFunction a(PeriodicGrid(32, 2 * pi)), b(PeriodicGrid(64, 2 * pi));
  CHECK_THROWS_AS(a + b, GridMismatch);
  CHECK_THROWS_AS(GridFunction(PeriodicGrid(32, 1.0), std::vector<double>(31)), GridMismatch);
  CHECK_THROWS_AS(parse_diff_method("chebyshev"), InvalidArgument);
}
