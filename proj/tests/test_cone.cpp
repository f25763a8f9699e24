#include "lightcone/correspondence.hpp"
#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/evolution.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lightcone;

namespace {
double sup_const(const GridFunction& f, double c) {
  double m = 0;
  for (int j = 0; j < f.size(); ++j) m = std::max(m, std::abs(f[j] - c));
  return m;
}
double sup(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs(); }
}  // namespace

TEST_CASE("circle lift has k = (1, -1/2, 0)") {
  auto u = lift_standard(curves::sphere("circle", 256));
  auto f = cone_frame(u);
  auto rep = normalization_residuals(u, f);
  CHECK(rep.group < 1e-10);
  CHECK(rep.max() < 1e-8);
  auto k = invariants_from_frame(maurer_cartan(f));
  CHECK(sup_const(k.k0, 1.0) < 1e-8);
  CHECK(sup_const(k.k1, -0.5) < 1e-8);
  CHECK(sup_const(k.k2, 0.0) < 1e-8);
}

TEST_CASE("frame normalizations on test curves") {
  for (const auto& name : {"perturbed_circle", "lissajous", "figure_eight", "ellipse"}) {
    auto j = lift_arclength_jets(curves::sphere(name, 256));
    auto f = cone_frame_from_jets(j);
    auto rep = normalization_residuals(j, f);
    INFO(name);
    CHECK(rep.group < 1e-10);
    CHECK(rep.max() < 1e-8);
    for (int i = 0; i < j.grid.size(); ++i) {
      Vec4 r2 = f.rho[i] * j.d[2][i];
      CHECK(std::abs(r2[2]) < 1e-8);
      CHECK(std::abs(std::abs(f.factors[i].xi[1]) - std::abs(f.xi2_formula[i])) < 1e-8);
    }
  }
}

TEST_CASE("flipping the enforced xi2 breaks the normalization") {
  auto u = lift_standard(curves::sphere("circle", 64));
  auto f = cone_frame(u);
  auto j = cone_jets(u);
  auto g = f.factors[5];
  g.xi[1] = -g.xi[1];
  Vec4 r2 = g.compose() * j.d[2][5];
  CHECK(std::abs(r2[2]) > 1.0);
}

TEST_CASE("Maurer-Cartan matrix has the invariant pattern") {
  auto u = lift_arclength(curves::sphere("lissajous", 256));
  auto K = maurer_cartan(cone_frame(u));
  CHECK(cone_pattern_defect(K) < 1e-7);
  CHECK(K.projection_defect < 1e-7);
  auto k = invariants_from_frame(K);
  CHECK(sup_const(k.k0, 1.0) < 1e-8);
}

TEST_CASE("invariants of a Lorentz image agree") {
  auto j = lift_arclength_jets(curves::sphere("perturbed_circle", 256));
  auto k = invariants_from_frame(maurer_cartan_from_jets(j));
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto kt = invariants_from_frame(maurer_cartan_from_jets(apply_lorentz(random_lorentz(s, 1.0).matrix(), j)));
    CHECK(sup(k.k1, kt.k1) < 1e-8);
    CHECK(sup(k.k2, kt.k2) < 1e-8);
  }
}

TEST_CASE("closed forms against the frame") {
  auto m = curves::sphere("ellipse", 256);
  auto u = lift_standard(m);  // k0 varies
  auto kfr = invariants_from_frame(maurer_cartan(cone_frame(u)));
  auto gen = cone_invariants_closed_form(u, ConeFormula::general);
  CHECK(sup(gen.k0, kfr.k0) < 1e-8);
  CHECK(sup(gen.k1, kfr.k1) < 1e-6);
  CHECK(sup(gen.k2, kfr.k2) < 1e-6);
  auto arc = cone_invariants_closed_form(u, ConeFormula::arclength);
  CHECK(sup(arc.k1, kfr.k1) > 1e-2);
  auto ua = reparametrize_arclength(u);
  auto ka = cone_invariants_closed_form(ua, ConeFormula::general);
  CHECK(sup_const(ka.k0, 1.0) < 1e-8);
}

TEST_CASE("geometric preconditions") {
  PeriodicGrid g(32, 2 * std::numbers::pi);
  std::vector<Vec4> s(32);
  for (int j = 0; j < 32; ++j) {
    double x = g.node(j);
    s[j] = Vec4(0.5, std::cos(x), std::sin(x), 1.0);
  }
  s[3][1] += 0.2;  // off the cone
  CHECK_THROWS_AS(validate_cone_curve(ConeCurve(g, s)), GeometryError);
  for (int j = 0; j < 32; ++j) s[j] = (1.0 + 0.1 * std::sin(g.node(j))) * Vec4(0.5, 1.0, 0.0, 1.0);
  try {
    cone_frame(ConeCurve(g, s));
    FAIL("radial curve accepted");
  } catch (const GeometryError& e) {
    CHECK(e.fault() == GeometryFault::radial_point);
    CHECK(e.node() >= 0);
  }
  std::vector<Vec4> bad(32, Vec4(0, 0, 0, 0));
  bad[0][0] = std::nan("");
  CHECK_THROWS_AS(ConeCurve(g, bad), GeometryError);
  CHECK_THROWS_AS(ConeCurve(g, std::vector<Vec4>(31)), GridMismatch);
}

TEST_CASE("u3 = 0 is a chart breakdown") {
  Vec4 u(0.0, 1.0, 0.0, 0.0);
  CHECK_THROWS_AS(cone_frame_at(u, Vec4(0, 0, 1, 0), Vec4(0, -1, 0, 0), 0), GeometryError);
}
