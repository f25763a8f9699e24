#include "lightcone/correspondence.hpp"
#include "lightcone/curves.hpp"
#include "lightcone/flows.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace lightcone;

namespace {
const PeriodicGrid grid(128, 2 * std::numbers::pi);
double sup(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("induced evolution equals P for arc-length flows") {
  std::mt19937_64 rng(11);
  auto one = GridFunction::constant(grid, 1.0);
  for (int t = 0; t < 3; ++t) {
    ConeInvariants k{one, random_band_limited(grid, 6, rng), random_band_limited(grid, 6, rng)};
    auto r1 = random_band_limited(grid, 6, rng), r2 = random_band_limited(grid, 6, rng);
    auto ind = induced_invariant_evolution(k, arclength_flow(r1, r2, one));
    auto p = apply_P(k, {r1, r2});
    CHECK(ind.k0.max_abs() < 1e-12);
    CHECK(sup(ind.k1, p.first) < 1e-12);
    CHECK(sup(ind.k2, p.second) < 1e-12);
  }
}

TEST_CASE("P of the gradient of h is the coupled KdV field") {
  std::mt19937_64 rng(5);
  auto one = GridFunction::constant(grid, 1.0);
  auto k1 = random_band_limited(grid, 6, rng), k2 = random_band_limited(grid, 6, rng);
  auto p = apply_P({one, k1, k2}, gradient_h(k1, k2));
  auto f = kdv_rhs(k1, k2);
  double s = std::max({1.0, f.first.max_abs(), f.second.max_abs()});
  CHECK(sup(p.first, f.first) / s < 1e-12);
  CHECK(sup(p.second, f.second) / s < 1e-12);
}

TEST_CASE("Poisson tensors are skew-adjoint") {
  std::mt19937_64 rng(9);
  ConeInvariants k{random_band_limited(grid, 4, rng, 0.2) + GridFunction::constant(grid, 1.5),
                   random_band_limited(grid, 6, rng), random_band_limited(grid, 6, rng)};
  CHECK(adjoint_residual(tensor_P(k.k1, k.k2).ops, grid, 4, 1) < 1e-10);
  CHECK(adjoint_residual(tensor_P_general(k).ops, grid, 4, 2) < 1e-10);
  CHECK(adjoint_residual(tensor_Q0(k.k0).ops, grid, 4, 3) < 1e-10);
  CHECK(adjoint_residual(tensor_Q0_restricted(grid).ops, grid, 4, 4) < 1e-10);
}

TEST_CASE("Q0 at unit k0 restricts to diag(-D, D)") {
  std::mt19937_64 rng(2);
  auto f = random_band_limited(grid, 6, rng), h = random_band_limited(grid, 6, rng);
  auto out = apply_Q0(GridFunction::constant(grid, 1.0), {random_band_limited(grid, 6, rng), f, h});
  CHECK(out[0].max_abs() == 0.0);
  CHECK(sup(out[1], -1.0 * derivative(f, 1)) < 1e-12);
  CHECK(sup(out[2], derivative(h, 1)) < 1e-12);
}

TEST_CASE("Jacobi identity of the restricted bracket") {
  CHECK(q0_jacobi_residual(PeriodicGrid(64, 2 * std::numbers::pi), 3, 1) < 1e-9);
}

TEST_CASE("Hamiltonian and its gradient") {
  auto c = GridFunction::sample(grid, [](double x) { return std::cos(x); });
  auto s = GridFunction::sample(grid, [](double x) { return std::sin(x); });
  CHECK(hamiltonian_h(c, s) == doctest::Approx(std::numbers::pi).epsilon(1e-14));
  auto g = gradient_h(c, s);
  CHECK(sup(g.first, c) == 0.0);
}

TEST_CASE("r3 keeps k0 fixed; the flow is tangent to the cone") {
  auto u = lift_arclength(curves::sphere("perturbed_circle", 128));
  auto f = cone_frame(u);
  auto k = invariants_from_frame(maurer_cartan(f));
  auto r = arclength_flow(k.k1, k.k2, k.k0);
  CHECK(r.arclength_preserving);
  auto rate = derivative(r.r1, 1) + r.r3 * k.k0;
  CHECK(rate.max_abs() < 1e-12);
  auto v = assemble_cone_flow(u, f, r);
  for (int j = 0; j < u.size(); ++j) CHECK(std::abs(minkowski_inner(u.samples[j], v[j])) < 1e-9);
}

TEST_CASE("sphere flow with s = (0, 1) moves the unit circle inward") {
  auto m = curves::sphere("circle", 64);
  auto zero = GridFunction::constant(m.grid, 0.0);
  auto v = assemble_sphere_flow(m, {zero, GridFunction::constant(m.grid, 1.0)});
  for (int j = 0; j < m.size(); ++j) CHECK((v[j] + m.samples[j]).norm() < 1e-12);
  auto w = assemble_sphere_flow(m, {GridFunction::constant(m.grid, 1.0), zero});
  for (int j = 0; j < m.size(); ++j) CHECK(std::abs(w[j].dot(m.samples[j])) < 1e-12);
}
