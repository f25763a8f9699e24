#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace lightcone {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using MinkowskiVector = Vec4;

const Mat4& metric_j();

double minkowski_inner(const Vec4& u, const Vec4& v);
double cone_residual(const Vec4& u);

// ||Θ^T J Θ - J||_max
double group_residual(const Mat4& theta);

// Inverse of a group element, J Θ^T J.
Mat4 group_inverse(const Mat4& theta);

class LorentzTransform {
public:
  LorentzTransform() : m_(Mat4::Identity()) {}
  // Throws InvalidArgument when the matrix is outside O(3,1) by more than tol.
  explicit LorentzTransform(const Mat4& m, double tol = 1e-10);

  static LorentzTransform unchecked(const Mat4& m);

  const Mat4& matrix() const { return m_; }
  LorentzTransform inverse() const { return unchecked(group_inverse(m_)); }
  LorentzTransform operator*(const LorentzTransform& o) const { return unchecked(m_ * o.m_); }
  Vec4 operator*(const Vec4& u) const { return m_ * u; }

private:
  Mat4 m_;
};

// X = [[a, z^T, 0], [w, B, z], [0, w^T, -a]] with B = [[0, b], [-b, 0]].
struct LorentzAlgebraElement {
  double a = 0.0;
  Vec2 z = Vec2::Zero();
  Vec2 w = Vec2::Zero();
  double b = 0.0;

  Mat4 matrix() const;

  // Orthogonal projection of an arbitrary 4x4 matrix onto the algebra shape.
  // defect receives the max-norm distance between M and its projection.
  static LorentzAlgebraElement project(const Mat4& m, double* defect = nullptr);

  LorentzAlgebraElement operator+(const LorentzAlgebraElement& o) const;
  LorentzAlgebraElement operator*(double s) const;
  double max_abs() const;
};

Mat4 g_plus(const Vec2& xi);                // g_1(ξ)
Mat4 g_zero(double alpha, const Mat2& A);   // g_0(α, A)
Mat4 g_minus(const Vec2& v);                // g_{-1}(v)

struct GroupFactors {
  double alpha = 1.0;
  Mat2 A = Mat2::Identity();
  Vec2 v = Vec2::Zero();
  Vec2 xi = Vec2::Zero();

  Mat4 compose() const { return g_plus(xi) * g_zero(alpha, A) * g_minus(v); }
};

// Θ = g_1(ξ) g_0(α,A) g_{-1}(v). Throws GeometryError(chart_breakdown) when Θ_00 vanishes.
GroupFactors factor(const Mat4& theta, double tol = 1e-10);

LorentzTransform exp_algebra(const LorentzAlgebraElement& x);

LorentzAlgebraElement random_algebra(std::uint64_t seed, double scale);
LorentzTransform random_lorentz(std::uint64_t seed, double scale);

}  // namespace lightcone
