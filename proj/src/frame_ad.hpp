#pragma once

// Forward-mode differentiation of the pointwise frame maps: evaluating the
// frame on dual-number jets gives rho and d rho/dx without a stencil.

#include "lightcone/lorentz.hpp"

#include <array>
#include <cmath>

namespace lightcone::detail {

struct Dual {
  double v = 0, d = 0;
  Dual() = default;
  Dual(double value, double deriv = 0) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
inline Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
inline Dual operator-(Dual a) { return {-a.v, -a.d}; }
inline Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
inline Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
inline Dual sqrt(Dual a) {
  double r = std::sqrt(a.v);
  return {r, a.d / (2 * r)};
}

template <class T>
using Mat = std::array<std::array<T, 4>, 4>;

template <class T>
Mat<T> mul(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      T s(0.0);
      for (int k = 0; k < 4; ++k) s = s + a[i][k] * b[k][j];
      c[i][j] = s;
    }
  return c;
}

template <class T>
Mat<T> identity() {
  Mat<T> m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = T(i == j ? 1.0 : 0.0);
  return m;
}

// g1(xi) g0(alpha, A) g-1(v)
template <class T>
Mat<T> compose(const std::array<T, 2>& xi, T alpha, const std::array<T, 4>& A, const std::array<T, 2>& v) {
  Mat<T> gp = identity<T>(), g0{}, gm = identity<T>();
  gp[1][0] = xi[0];
  gp[2][0] = xi[1];
  gp[3][0] = T(0.5) * (xi[0] * xi[0] + xi[1] * xi[1]);
  gp[3][1] = xi[0];
  gp[3][2] = xi[1];
  for (auto& r : g0) r.fill(T(0.0));
  g0[0][0] = alpha;
  g0[1][1] = A[0];
  g0[1][2] = A[1];
  g0[2][1] = A[2];
  g0[2][2] = A[3];
  g0[3][3] = T(1.0) / alpha;
  gm[0][1] = v[0];
  gm[0][2] = v[1];
  gm[0][3] = T(0.5) * (v[0] * v[0] + v[1] * v[1]);
  gm[1][3] = v[0];
  gm[2][3] = v[1];
  return mul(mul(gp, g0), gm);
}

// Same map as cone_frame_at, without the chart checks.
template <class T>
Mat<T> cone_frame_generic(const std::array<T, 4>& u, const std::array<T, 4>& du, const std::array<T, 4>& ddu) {
  T u3 = u[3];
  std::array<T, 2> v{-u[1] / u3, -u[2] / u3};
  T alpha = u3;
  T y0 = du[1] - u[1] * (du[3] / u3), y1 = du[2] - u[2] * (du[3] / u3);
  T ny = sqrt(y0 * y0 + y1 * y1);
  T c = y0 / ny, s = y1 / ny;
  std::array<T, 4> A{c, s, -s, c};
  T xi0 = -du[3] / (u3 * ny);
  T z0 = ddu[0] + v[0] * ddu[1] + v[1] * ddu[2] + T(0.5) * (v[0] * v[0] + v[1] * v[1]) * ddu[3];
  T z1 = ddu[1] + v[0] * ddu[3], z2 = ddu[2] + v[1] * ddu[3];
  T a = alpha * z0;
  T az1 = -s * z1 + c * z2;
  return compose<T>({xi0, -az1 / a}, alpha, A, v);
}

template <class T>
Mat<T> sphere_frame_generic(const std::array<T, 2>& m, const std::array<T, 2>& dm, const std::array<T, 2>& ddm) {
  T s2 = dm[0] * dm[0] + dm[1] * dm[1];
  T s = sqrt(s2);
  std::array<T, 4> A{dm[0] / s, dm[1] / s, -dm[1] / s, dm[0] / s};
  std::array<T, 2> xi{(dm[0] * ddm[0] + dm[1] * ddm[1]) / s2, -(dm[0] * ddm[1] - dm[1] * ddm[0]) / s2};
  return compose<T>(xi, T(1.0) / s, A, {-m[0], -m[1]});
}

inline void split(const Mat<Dual>& m, Mat4& value, Mat4& deriv) {
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      value(i, j) = m[i][j].v;
      deriv(i, j) = m[i][j].d;
    }
}

template <int N, class V>
std::array<Dual, N> seed(const V& x, const V& dx) {
  std::array<Dual, N> out;
  for (int i = 0; i < N; ++i) out[i] = Dual(x[i], dx[i]);
  return out;
}

}  // namespace lightcone::detail
