#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lightcone;

namespace {
double sup(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs(); }
const double pi = std::numbers::pi;
}  // namespace

TEST_CASE("soliton is carried at speed 4") {
  PeriodicGrid g(512, 40.0);
  auto k = kdv_soliton(g, 1.0, 0.5, 0.0);
  auto tr = integrate_kdv(k, 1.0, 1e-4, KdvScheme::ifrk4, 2);
  REQUIRE(tr.states.size() == 3);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  CHECK(sup(tr.states.back().k1, kdv_soliton(g, 1.0, 0.5, 1.0).k1) < 1e-6);
  CHECK(std::abs(integrate(tr.states.back().k1) - integrate(k.k1)) < 1e-8);
}

TEST_CASE("constant invariants are a fixed point; RK4 guard") {
  PeriodicGrid g(64, 2 * pi);
  ConeInvariants c{GridFunction::constant(g, 1.0), GridFunction::constant(g, 0.3), GridFunction::constant(g, -0.2)};
  auto s = step_kdv(c, 1e-3, KdvScheme::ifrk4);
  CHECK(sup(s.k1, c.k1) < 1e-14);
  CHECK(sup(s.k2, c.k2) < 1e-14);
  try {
    step_kdv(c, 1.0, KdvScheme::rk4);
    FAIL("unstable step accepted");
  } catch (const GuardError& e) {
    CHECK(e.kind() == GuardKind::stability);
  }
  CHECK_NOTHROW(step_kdv(c, 0.02 * std::pow(g.dx(), 3), KdvScheme::rk4));
}

TEST_CASE("curve flow with the KdV rule matches the KdV solver") {
  // N = 64 keeps this a unit test; the N = 256 run is the acceptance check.
  auto calib = calibrate(curves::calibration_suite(), {128});
  RealizationOptions o;
  o.t_end = 0.01;
  o.outputs = 2;
  o.run_literal = false;
  auto rep = run_realization_experiment(curves::perturbed_circle(64, 1e-2), calib, o);
  CHECK(rep.kdv_rel_l2 < 1e-4);
  CHECK(rep.k0_drift_rate < 1e-7);
  CHECK(rep.sphere_dev < 1e-4);
  CHECK(rep.max_cone_residual < 1e-9);
}

TEST_CASE("reconstruction of the circle from constant invariants") {
  PeriodicGrid g(128, 2 * pi);
  ConeInvariants k{GridFunction::constant(g, 1.0), GridFunction::constant(g, -0.5), GridFunction::constant(g, 0.0)};
  auto rec = solve_frame_ode(maurer_cartan_from_invariants(k), Mat4::Identity());
  for (const auto& v : rec.curve.samples) CHECK(cone_residual(v) < 1e-10);
  auto mono = monodromy(rec);
  CHECK(mono.group_residual < 1e-10);
  CHECK((mono.matrix - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-9);
  // leaves the u3 > 0 chart; a Lorentz transform brings it back
  Mat4 th = chart_transform(rec.curve);
  CHECK(chart_margin(apply_lorentz(th, rec.curve)) > 1e-2);
  auto back = invariants_from_frame(maurer_cartan_from_jets(apply_lorentz(th, rec.jets)));
  CHECK(sup(back.k1, k.k1) < 1e-6);
  CHECK(sup(back.k2, k.k2) < 1e-6);
}

TEST_CASE("generic monodromy spectrum pairs up and is conserved by KdV") {
  PeriodicGrid g(128, 2 * pi);
  ConeInvariants k{GridFunction::constant(g, 1.0), GridFunction::sample(g, [](double x) { return 0.3 + 0.2 * std::cos(x); }),
                   GridFunction::sample(g, [](double x) { return 0.05 + 0.1 * std::sin(2 * x); })};
  auto mono = monodromy(solve_frame_ode(maurer_cartan_from_invariants(k), Mat4::Identity()));
  CHECK(mono.group_residual < 1e-10);
  CHECK(mono.reciprocal_defect < 1e-8);
  CHECK(mono.conjugation_defect < 1e-8);
  auto iso = monodromy_along_kdv(k, 0.02, 1e-4, KdvScheme::ifrk4);
  CHECK(iso.drift < 1e-6);
}

TEST_CASE("constant K integrates to its exponential") {
  PeriodicGrid g(64, 2 * pi);
  ConeInvariants k{GridFunction::constant(g, 1.0), GridFunction::constant(g, 0.0), GridFunction::constant(g, 0.0)};
  auto K = maurer_cartan_from_invariants(k);
  auto rec = solve_frame_ode(K, Mat4::Identity());
  for (int j = 0; j < g.size(); ++j)
    CHECK((rec.rho[j] - exp_algebra(K.K[0] * g.node(j)).matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("frame ODE convention: only rho_x = K rho reproduces the curve") {
  auto u = lift_arclength(curves::sphere("perturbed_circle", 128));
  auto f = cone_frame(u);
  auto K = maurer_cartan(f);
  auto left = solve_frame_ode(K, f.rho[0], {4, FrameConvention::k_left});
  auto right = solve_frame_ode(K, f.rho[0], {4, FrameConvention::k_right});
  double dl = 0, dr = 0;
  for (int j = 0; j < u.size(); ++j) {
    dl = std::max(dl, (left.curve.samples[j] - u.samples[j]).norm());
    dr = std::max(dr, (right.curve.samples[j] - u.samples[j]).norm());
  }
  CHECK(dl < 1e-6);
  CHECK(dr > 1e-3);
  CHECK(congruence_residual(u, f.rho[0], solve_frame_ode(K, Mat4::Identity())) < 1e-7);
}
