#include "lightcone/lorentz.hpp"

#include "lightcone/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

namespace lightcone {

const Mat4& metric_j() {
  static const Mat4 j = [] {
    Mat4 m = Mat4::Zero();
    m(0, 3) = m(3, 0) = -1.0;
    m(1, 1) = m(2, 2) = 1.0;
    return m;
  }();
  return j;
}

double minkowski_inner(const Vec4& u, const Vec4& v) {
  return -u[0] * v[3] - u[3] * v[0] + u[1] * v[1] + u[2] * v[2];
}

double cone_residual(const Vec4& u) { return std::abs(minkowski_inner(u, u)); }

double group_residual(const Mat4& theta) {
  return (theta.transpose() * metric_j() * theta - metric_j()).cwiseAbs().maxCoeff();
}

Mat4 group_inverse(const Mat4& theta) { return metric_j() * theta.transpose() * metric_j(); }

LorentzTransform::LorentzTransform(const Mat4& m, double tol) : m_(m) {
  double r = group_residual(m);
  if (!(r <= tol))
    throw InvalidArgument("matrix is not in O(3,1): residual " + std::to_string(r));
}

LorentzTransform LorentzTransform::unchecked(const Mat4& m) {
  LorentzTransform t;
  t.m_ = m;
  return t;
}

Mat4 LorentzAlgebraElement::matrix() const {
  Mat4 x = Mat4::Zero();
  x(0, 0) = a;
  x(3, 3) = -a;
  x(0, 1) = z[0];
  x(0, 2) = z[1];
  x(1, 3) = z[0];
  x(2, 3) = z[1];
  x(1, 0) = w[0];
  x(2, 0) = w[1];
  x(3, 1) = w[0];
  x(3, 2) = w[1];
  x(1, 2) = b;
  x(2, 1) = -b;
  return x;
}

LorentzAlgebraElement LorentzAlgebraElement::project(const Mat4& m, double* defect) {
  LorentzAlgebraElement e;
  e.a = 0.5 * (m(0, 0) - m(3, 3));
  e.z = Vec2(0.5 * (m(0, 1) + m(1, 3)), 0.5 * (m(0, 2) + m(2, 3)));
  e.w = Vec2(0.5 * (m(1, 0) + m(3, 1)), 0.5 * (m(2, 0) + m(3, 2)));
  e.b = 0.5 * (m(1, 2) - m(2, 1));
  if (defect) *defect = (m - e.matrix()).cwiseAbs().maxCoeff();
  return e;
}

LorentzAlgebraElement LorentzAlgebraElement::operator+(const LorentzAlgebraElement& o) const {
  return {a + o.a, z + o.z, w + o.w, b + o.b};
}

LorentzAlgebraElement LorentzAlgebraElement::operator*(double s) const {
  return {a * s, z * s, w * s, b * s};
}

double LorentzAlgebraElement::max_abs() const {
  return std::max({std::abs(a), z.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff(), std::abs(b)});
}

Mat4 g_plus(const Vec2& xi) {
  Mat4 g = Mat4::Identity();
  g(1, 0) = xi[0];
  g(2, 0) = xi[1];
  g(3, 0) = 0.5 * xi.squaredNorm();
  g(3, 1) = xi[0];
  g(3, 2) = xi[1];
  return g;
}

Mat4 g_zero(double alpha, const Mat2& A) {
  Mat4 g = Mat4::Zero();
  g(0, 0) = alpha;
  g.block<2, 2>(1, 1) = A;
  g(3, 3) = 1.0 / alpha;
  return g;
}

Mat4 g_minus(const Vec2& v) {
  Mat4 g = Mat4::Identity();
  g(0, 1) = v[0];
  g(0, 2) = v[1];
  g(0, 3) = 0.5 * v.squaredNorm();
  g(1, 3) = v[0];
  g(2, 3) = v[1];
  return g;
}

GroupFactors factor(const Mat4& theta, double tol) {
  GroupFactors f;
  double scale = std::max(1.0, theta.cwiseAbs().maxCoeff());
  f.alpha = theta(0, 0);
  if (!(std::abs(f.alpha) > tol * scale))
    throw GeometryError(GeometryFault::chart_breakdown, -1, "factorization chart breakdown: Theta_00 = 0");
  f.xi = Vec2(theta(1, 0), theta(2, 0)) / f.alpha;
  // g_1(-ξ) Θ = [[α, α v^T, .], [0, A, A v], [0, 0, 1/α]]
  Mat4 s = g_plus(-f.xi) * theta;
  f.A = s.block<2, 2>(1, 1);
  f.v = Vec2(s(0, 1), s(0, 2)) / f.alpha;
  return f;
}

LorentzTransform exp_algebra(const LorentzAlgebraElement& x) {
  Mat4 m = x.matrix();
  return LorentzTransform::unchecked(m.exp());
}

LorentzAlgebraElement random_algebra(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  LorentzAlgebraElement e;
  e.a = scale * u(rng);
  e.z = Vec2(scale * u(rng), scale * u(rng));
  e.w = Vec2(scale * u(rng), scale * u(rng));
  e.b = scale * u(rng);
  return e;
}

LorentzTransform random_lorentz(std::uint64_t seed, double scale) {
  if (scale < 0) throw InvalidArgument("random_lorentz: scale must be non-negative");
  return exp_algebra(random_algebra(seed, scale));
}

const char* to_string(GeometryFault f) {
  switch (f) {
    case GeometryFault::chart_breakdown: return "ChartBreakdown";
    case GeometryFault::radial_point: return "RadialPoint";
    case GeometryFault::degenerate_speed: return "DegenerateSpeed";
    case GeometryFault::off_cone: return "OffCone";
    case GeometryFault::non_finite: return "NonFinite";
  }
  return "Geometry";
}

GeometryError::GeometryError(GeometryFault fault, long node, const std::string& what)
    : Error(std::string(to_string(fault)) + (node >= 0 ? " at node " + std::to_string(node) : "") + ": " + what),
      fault_(fault),
      node_(node) {}

}  // namespace lightcone
