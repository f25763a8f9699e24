#include "lightcone/flows.hpp"

#include "lightcone/errors.hpp"

#include <cmath>
#include <random>

namespace lightcone {

using Op = LinearPeriodicOperator;

namespace {

GridFunction reciprocal(const GridFunction& k0) {
  GridFunction r(k0.grid);
  for (int j = 0; j < k0.size(); ++j) {
    if (!(k0[j] > 0)) throw GeometryError(GeometryFault::radial_point, j, "k0 must be positive");
    r[j] = 1.0 / k0[j];
  }
  return r;
}

GridFunction d(const GridFunction& f, DiffMethod m, int order = 1) { return derivative(f, order, m); }

}  // namespace

Vec4 cone_velocity_at(const Vec4& u, const GroupFactors& f, double r1, double r2, double r3) {
  Vec2 uh(u[1], u[2]);
  Vec2 rr(r1, r2);
  Vec2 uh_t = f.A.transpose() * rr - uh * f.xi.dot(rr) + uh * r3;
  double u3_t = -u[3] * f.xi.dot(rr) + u[3] * r3;
  double u0_t = uh.dot(uh_t) / u[3] - uh.squaredNorm() * u3_t / (2 * u[3] * u[3]);
  return Vec4(u0_t, uh_t[0], uh_t[1], u3_t);
}

std::vector<Vec4> assemble_cone_flow(const ConeCurve& c, const ConeFrameField& f, const FlowCoefficients& r) {
  require_same_grid(c.grid, f.grid, "assemble_cone_flow");
  require_same_grid(c.grid, r.r1.grid, "assemble_cone_flow");
  require_same_grid(c.grid, r.r2.grid, "assemble_cone_flow");
  require_same_grid(c.grid, r.r3.grid, "assemble_cone_flow");
  std::vector<Vec4> v(c.size());
  for (int j = 0; j < c.size(); ++j) v[j] = cone_velocity_at(c.samples[j], f.factors[j], r.r1[j], r.r2[j], r.r3[j]);
  return v;
}

Vec2 sphere_velocity_at(const Vec2& dm, double s1, double s2) {
  return Vec2(dm[0] * s1 - dm[1] * s2, dm[1] * s1 + dm[0] * s2);
}

std::vector<Vec2> assemble_sphere_flow(const SphereCurve& c, const SphereFlowCoefficients& s, DiffMethod m) {
  require_same_grid(c.grid, s.s1.grid, "assemble_sphere_flow");
  require_same_grid(c.grid, s.s2.grid, "assemble_sphere_flow");
  auto j = sphere_jets(c, m);
  std::vector<Vec2> v(c.size());
  for (int i = 0; i < c.size(); ++i) {
    if (!(j.d[1][i].squaredNorm() > 1e-24)) throw GeometryError(GeometryFault::degenerate_speed, i, "|m'| = 0");
    v[i] = sphere_velocity_at(j.d[1][i], s.s1[i], s.s2[i]);
  }
  return v;
}

GridFunction arclength_r3(const GridFunction& r1, const GridFunction& k0, DiffMethod m) {
  require_same_grid(r1.grid, k0.grid, "arclength_r3");
  return -(d(r1, m) * reciprocal(k0));
}

FlowCoefficients arclength_flow(const GridFunction& r1, const GridFunction& r2, const GridFunction& k0,
                                DiffMethod m) {
  return FlowCoefficients{r1, r2, arclength_r3(r1, k0, m), true};
}

InvariantRates induced_invariant_evolution(const ConeInvariants& k, const FlowCoefficients& r, DiffMethod m) {
  require_same_grid(k.k0.grid, r.r1.grid, "induced_invariant_evolution");
  GridFunction ik0 = reciprocal(k.k0);
  const GridFunction &k0 = k.k0, &k1 = k.k1, &k2 = k.k2;
  GridFunction dr1 = d(r.r1, m), dr2 = d(r.r2, m), dr3 = d(r.r3, m);
  GridFunction n1 = ik0 * (k1 * r.r1 + k2 * r.r2 + dr3);
  GridFunction n2 = ik0 * (d(ik0 * dr2, m) + k2 * r.r1 - k1 * r.r2);
  return InvariantRates{dr1 + r.r3 * k0, d(n1, m) - k1 * r.r3 + k2 * ik0 * dr2,
                        d(n2, m) - k2 * r.r3 - k1 * ik0 * dr2};
}

PoissonTensor tensor_P(const GridFunction& k1, const GridFunction& k2) {
  require_same_grid(k1.grid, k2.grid, "tensor_P");
  Op D = Op::D(), K1 = Op::multiply(k1), K2 = Op::multiply(k2);
  Op D3 = D * D * D;
  OperatorMatrix P(2);
  P.set(0, 0, -D3 + K1 * D + D * K1);
  P.set(0, 1, D * K2 + K2 * D);
  P.set(1, 0, D * K2 + K2 * D);
  P.set(1, 1, D3 - D * K1 - K1 * D);
  return {"P", P};
}

PoissonTensor tensor_P_general(const ConeInvariants& k) {
  GridFunction ik0 = reciprocal(k.k0);
  Op D = Op::D(), I = Op::multiply(ik0), A = Op::multiply(k.k1 * ik0), B = Op::multiply(k.k2 * ik0);
  Op D3 = D * I * D * I * D;
  OperatorMatrix P(3);
  P.set(1, 1, -D3 + D * A + A * D);
  P.set(1, 2, B * D + D * B);
  P.set(2, 1, B * D + D * B);
  P.set(2, 2, D3 - D * A - A * D);
  return {"P_gen", P};
}

PoissonTensor tensor_Q0(const GridFunction& k0) {
  Op D = Op::D(), I = Op::multiply(reciprocal(k0));
  Op S = 0.5 * (D * I + I * D);
  OperatorMatrix Q(3);
  Q.set(1, 1, -S);
  Q.set(2, 2, S);
  return {"Q0_gen", Q};
}

PoissonTensor tensor_Q0_restricted(const PeriodicGrid&) {
  OperatorMatrix Q(2);
  Q.set(0, 0, -Op::D());
  Q.set(1, 1, Op::D());
  return {"Q0_restricted", Q};
}

FieldPair apply_P(const ConeInvariants& k, const FieldPair& rr, DiffMethod m) {
  require_same_grid(k.k1.grid, rr.first.grid, "apply_P");
  require_same_grid(k.k1.grid, rr.second.grid, "apply_P");
  auto out = tensor_P(k.k1, k.k2).ops.apply({rr.first, rr.second}, m);
  return {out[0], out[1]};
}

FieldTriple apply_P_general(const ConeInvariants& k, const FieldTriple& hh, DiffMethod m) {
  auto out = tensor_P_general(k).ops.apply({hh[0], hh[1], hh[2]}, m);
  return {out[0], out[1], out[2]};
}

FieldTriple apply_Q0(const GridFunction& k0, const FieldTriple& hh, DiffMethod m) {
  auto out = tensor_Q0(k0).ops.apply({hh[0], hh[1], hh[2]}, m);
  return {out[0], out[1], out[2]};
}

FieldPair kdv_rhs(const GridFunction& k1, const GridFunction& k2, DiffMethod m) {
  require_same_grid(k1.grid, k2.grid, "kdv_rhs");
  GridFunction d1 = d(k1, m), d2 = d(k2, m);
  return {-d(k1, m, 3) + 3.0 * k1 * d1 + 3.0 * k2 * d2, d(k2, m, 3) + d1 * k2 - k1 * d2};
}

double hamiltonian_h(const GridFunction& k1, const GridFunction& k2) {
  return 0.5 * (inner(k1, k1) + inner(k2, k2));
}

FieldPair gradient_h(const GridFunction& k1, const GridFunction& k2) { return {k1, k2}; }

namespace {

// F(k) = ∫ Σ_p c_p(x) k1^a_p k2^b_p with a_p + b_p <= 3.
struct LocalFunctional {
  std::vector<std::array<int, 2>> powers;
  std::vector<std::vector<double>> coef;

  double value(const std::vector<double>& k1, const std::vector<double>& k2, double dx) const {
    double s = 0;
    for (size_t p = 0; p < powers.size(); ++p)
      for (size_t j = 0; j < k1.size(); ++j)
        s += coef[p][j] * std::pow(k1[j], powers[p][0]) * std::pow(k2[j], powers[p][1]);
    return s * dx;
  }
  void gradient(const std::vector<double>& k1, const std::vector<double>& k2, std::vector<double>& g1,
                std::vector<double>& g2) const {
    g1.assign(k1.size(), 0.0);
    g2.assign(k1.size(), 0.0);
    for (size_t p = 0; p < powers.size(); ++p) {
      auto [a, b] = powers[p];
      for (size_t j = 0; j < k1.size(); ++j) {
        if (a > 0) g1[j] += coef[p][j] * a * std::pow(k1[j], a - 1) * std::pow(k2[j], b);
        if (b > 0) g2[j] += coef[p][j] * b * std::pow(k1[j], a) * std::pow(k2[j], b - 1);
      }
    }
  }
};

using Grad = std::array<std::vector<double>, 2>;

double bracket(const Grad& f, const Grad& g, double L, double dx) {
  auto d1 = spectral_derivative(g[0], L, 1);
  auto d2 = spectral_derivative(g[1], L, 1);
  double s = 0;
  for (size_t j = 0; j < d1.size(); ++j) s += -f[0][j] * d1[j] + f[1][j] * d2[j];
  return s * dx;
}

}  // namespace

double q0_jacobi_residual(const PeriodicGrid& grid, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = grid.size();
  const double L = grid.length(), dx = grid.dx();
  const std::vector<std::array<int, 2>> powers = {{1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {0, 3}};
  auto make = [&] {
    LocalFunctional f;
    f.powers = powers;
    for (size_t p = 0; p < powers.size(); ++p) f.coef.push_back(random_band_limited(grid, 4, rng, 0.5).values);
    return f;
  };
  auto grad_of = [&](const LocalFunctional& f, const std::vector<double>& k1, const std::vector<double>& k2) {
    Grad g;
    f.gradient(k1, k2, g[0], g[1]);
    return g;
  };
  // Variational gradient of B(k) = {G,H}(k): ∂B/∂k_j / dx by the 4-point stencil, exact for quartic B.
  auto bracket_gradient = [&](const LocalFunctional& G, const LocalFunctional& H, std::vector<double> k1,
                              std::vector<double> k2) {
    Grad out{std::vector<double>(n), std::vector<double>(n)};
    const double e = 1e-3;
    auto B = [&](const std::vector<double>& a, const std::vector<double>& b) {
      return bracket(grad_of(G, a, b), grad_of(H, a, b), L, dx);
    };
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < n; ++j) {
        auto& v = c == 0 ? k1 : k2;
        double v0 = v[j];
        double f[4];
        const double steps[4] = {2 * e, e, -e, -2 * e};
        for (int s = 0; s < 4; ++s) {
          v[j] = v0 + steps[s];
          f[s] = B(k1, k2);
        }
        v[j] = v0;
        out[c][j] = (-f[0] + 8 * f[1] - 8 * f[2] + f[3]) / (12 * e) / dx;
      }
    return out;
  };
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    auto k1 = random_band_limited(grid, 4, rng).values;
    auto k2 = random_band_limited(grid, 4, rng).values;
    LocalFunctional F = make(), G = make(), H = make();
    Grad gF = grad_of(F, k1, k2), gG = grad_of(G, k1, k2), gH = grad_of(H, k1, k2);
    double a = bracket(gF, bracket_gradient(G, H, k1, k2), L, dx);
    double b = bracket(gG, bracket_gradient(H, F, k1, k2), L, dx);
    double c = bracket(gH, bracket_gradient(F, G, k1, k2), L, dx);
    double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
    worst = std::max(worst, std::abs(a + b + c) / scale);
  }
  return worst;
}

}  // namespace lightcone
