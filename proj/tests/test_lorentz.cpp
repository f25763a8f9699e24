#include "lightcone/errors.hpp"
#include "lightcone/lorentz.hpp"

#include <doctest.h>

using namespace lightcone;

TEST_CASE("metric and cone") {
  Mat4 J = metric_j();
  CHECK(J(0, 3) == -1.0);
  CHECK(J(3, 0) == -1.0);
  CHECK(J(1, 1) == 1.0);
  CHECK(J(2, 2) == 1.0);
  CHECK(J(0, 0) == 0.0);
  // (|m|²/2, m, 1) is null for any m
  Vec4 u(0.5 * (0.3 * 0.3 + 0.7 * 0.7), 0.3, 0.7, 1.0);
  CHECK(cone_residual(u) < 1e-15);
  CHECK(minkowski_inner(Vec4(0, 1, 0, 0), Vec4(0, 1, 0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("factors compose into group elements") {
  GroupFactors f;
  f.alpha = 1.7;
  f.A << std::cos(0.4), std::sin(0.4), -std::sin(0.4), std::cos(0.4);
  f.v = Vec2(0.2, -1.1);
  f.xi = Vec2(-0.5, 0.9);
  Mat4 t = f.compose();
  CHECK(group_residual(t) < 1e-12);
  auto g = factor(t);
  CHECK(std::abs(g.alpha - f.alpha) < 1e-12);
  CHECK((g.v - f.v).norm() < 1e-12);
  CHECK((g.xi - f.xi).norm() < 1e-12);
  CHECK((g.A - f.A).norm() < 1e-12);
}

TEST_CASE("random transforms are in O(3,1) and factor back") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    Mat4 t = random_lorentz(s, 1.0).matrix();
    CHECK(group_residual(t) < 1e-10);
    CHECK((factor(t).compose() - t).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((group_inverse(t) * t - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((random_lorentz(7, 1.0).matrix() - random_lorentz(7, 1.0).matrix()).norm() == 0.0);
}

TEST_CASE("factorization chart breakdown") {
  Mat4 t = Mat4::Zero();
  t(0, 3) = -1;
  t(3, 0) = -1;
  t(1, 1) = 1;
  t(2, 2) = 1;
  CHECK(group_residual(t) < 1e-15);
  CHECK_THROWS_AS(factor(t), GeometryError);
}

TEST_CASE("algebra projection and exponential") {
  auto x = random_algebra(3, 0.8);
  double defect = 1;
  auto y = LorentzAlgebraElement::project(x.matrix(), &defect);
  CHECK(defect < 1e-15);
  CHECK((y.matrix() - x.matrix()).norm() < 1e-15);
  Mat4 X = x.matrix();
  CHECK((X.transpose() * metric_j() + metric_j() * X).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(group_residual(exp_algebra(x).matrix()) < 1e-12);
  Mat4 m = Mat4::Identity();
  LorentzAlgebraElement::project(m, &defect);
  CHECK(defect > 0.5);
}

TEST_CASE("LorentzTransform rejects non-group matrices") {
  Mat4 m = Mat4::Identity();
  m(0, 1) = 0.5;
  CHECK_THROWS_AS(LorentzTransform{m}, InvalidArgument);
  CHECK_NOTHROW(LorentzTransform{Mat4::Identity()});
}
