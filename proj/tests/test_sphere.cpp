#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/sphere.hpp"

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

TEST_CASE("circle kappa from the normalized-image oracle") {
  auto m = curves::sphere("circle", 256);
  auto o = sphere_invariants_from_image(m);
  CHECK(sup_const(o.kappa1, 0.5) < 1e-8);
  CHECK(sup_const(o.kappa2, 0.0) < 1e-8);
  auto cf = sphere_invariants_closed_form(m);
  CHECK(sup_const(cf.kappa1, 0.5) < 1e-8);
  auto fr = sphere_invariants_from_frame(m);
  CHECK(sup_const(fr.kappa1, -0.5) < 1e-8);  // -w1 entry convention
}

TEST_CASE("sphere frame normalizations") {
  for (const auto& name : curves::names()) {
    auto m = curves::sphere(name, 256);
    auto f = sphere_frame(m);
    auto rep = sphere_normalization_residuals(m, f);
    INFO(name);
    CHECK(rep.group < 1e-10);
    CHECK(rep.max() < 1e-8);
  }
}

TEST_CASE("closed form agrees with frame up to the fixed sign") {
  for (const auto& name : curves::names()) {
    auto j = sphere_jets(curves::sphere(name, 256));
    auto fr = sphere_invariants_from_frame(sphere_maurer_cartan_from_jets(j));
    auto cf = sphere_invariants_closed_form(j);
    INFO(name);
    CHECK(sup(cf.kappa1, -1.0 * fr.kappa1) < 1e-6);
    CHECK(sup(cf.kappa2, fr.kappa2) < 1e-6);
  }
}

TEST_CASE("Moebius action: factored against projective, and invariance") {
  auto m = curves::sphere("lissajous", 128);
  auto j = sphere_jets(m);
  auto k = sphere_invariants_from_frame(sphere_maurer_cartan_from_jets(j));
  for (std::uint64_t s = 0; s < 10; ++s) {
    Mat4 t = random_lorentz(s, 0.5).matrix();
    auto a = moebius_apply(t, m), b = moebius_apply_projective(t, m);
    for (int i = 0; i < m.size(); ++i) CHECK((a.samples[i] - b.samples[i]).norm() < 1e-10);
    SphereJets tj = j;
    for (int i = 0; i < m.size(); ++i) {
      auto n = image_jet(t, {j.d[0][i], j.d[1][i], j.d[2][i], j.d[3][i]}, i);
      for (int o = 0; o < 4; ++o) tj.d[o][i] = n[o];
    }
    auto kt = sphere_invariants_from_frame(sphere_maurer_cartan_from_jets(tj));
    CHECK(sup(kt.kappa1, k.kappa1) < 1e-8);
    CHECK(sup(kt.kappa2, k.kappa2) < 1e-8);
  }
}

TEST_CASE("degenerate speed is rejected") {
  PeriodicGrid g(32, 2 * std::numbers::pi);
  std::vector<Vec2> s(32);
  for (int j = 0; j < 32; ++j) {
    double x = g.node(j), t = x - std::sin(x);
    s[j] = Vec2(std::cos(t), std::sin(t));
  }
  try {
    validate_sphere_curve(SphereCurve(g, s));
    FAIL("stopped curve accepted");
  } catch (const GeometryError& e) {
    CHECK(e.fault() == GeometryFault::degenerate_speed);
    CHECK(e.node() == 0);
  }
}
