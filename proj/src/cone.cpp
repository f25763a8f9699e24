#include "lightcone/cone.hpp"

#include "lightcone/errors.hpp"

#include "frame_ad.hpp"

#include <cmath>
#include <sstream>

namespace lightcone {

namespace {

double det3(const Vec4& a, const Vec4& b, const Vec4& c) {
  Eigen::Matrix3d m;
  m.col(0) = a.tail<3>();
  m.col(1) = b.tail<3>();
  m.col(2) = c.tail<3>();
  return m.determinant();
}

Vec2 hat(const Vec4& u) { return Vec2(u[1], u[2]); }

// On the cone <u,u'> = 0, so <u',u'> = 0 means u' is a multiple of u (possibly zero).
// Measured against the largest |u'|² on the curve so stopped nodes are caught too.
void check_not_radial(const ConeJets& j) {
  double scale = 0;
  for (const auto& du : j.d[1]) scale = std::max(scale, du.squaredNorm());
  for (int i = 0; i < j.grid.size(); ++i) {
    double n2 = minkowski_inner(j.d[1][i], j.d[1][i]);
    if (!(n2 > 1e-12 * scale)) {
      std::ostringstream s;
      s << "<u',u'>_J = " << n2 << ", u' is radial";
      throw GeometryError(GeometryFault::radial_point, i, s.str());
    }
  }
}

}  // namespace

ConeCurve::ConeCurve(const PeriodicGrid& g, std::vector<Vec4> s) : grid(g), samples(std::move(s)) {
  if ((int)samples.size() != g.size())
    throw GridMismatch("ConeCurve: " + std::to_string(samples.size()) + " samples for " +
                       std::to_string(g.size()) + " nodes");
  for (size_t j = 0; j < samples.size(); ++j)
    if (!samples[j].allFinite()) throw GeometryError(GeometryFault::non_finite, (long)j, "non-finite sample");
}

std::vector<double> ConeCurve::component(int c) const {
  std::vector<double> v(samples.size());
  for (size_t j = 0; j < samples.size(); ++j) v[j] = samples[j][c];
  return v;
}

ConeCurve apply_lorentz(const Mat4& theta, const ConeCurve& c) {
  std::vector<Vec4> s(c.samples.size());
  for (size_t j = 0; j < s.size(); ++j) s[j] = theta * c.samples[j];
  return ConeCurve(c.grid, std::move(s));
}

ConeJets cone_jets(const ConeCurve& c, DiffMethod m, Warnings* warnings) {
  ConeJets j{c.grid, {}};
  for (auto& d : j.d) d.assign(c.size(), Vec4::Zero());
  for (int comp = 0; comp < 4; ++comp) {
    auto col = c.component(comp);
    if (warnings && m == DiffMethod::spectral && !spectrum_resolved(col))
      warnings->add("UnresolvedSpectrum: cone curve component u" + std::to_string(comp));
    auto jet = derivative_jet(col, c.grid.length(), 3, m);
    for (int o = 0; o < 4; ++o)
      for (int i = 0; i < c.size(); ++i) j.d[o][i][comp] = jet[o][i];
  }
  return j;
}

void validate_cone_curve(const ConeCurve& c, const Tolerances& tol, DiffMethod m) {
  for (int j = 0; j < c.size(); ++j) {
    const Vec4& u = c.samples[j];
    double scale = std::max(1.0, u.squaredNorm());
    if (cone_residual(u) > tol.cone * scale) {
      std::ostringstream s;
      s << "sample is off the light cone, |<u,u>| = " << cone_residual(u);
      throw GeometryError(GeometryFault::off_cone, j, s.str());
    }
    if (!(std::abs(u[3]) > 1e-12 * std::sqrt(scale)))
      throw GeometryError(GeometryFault::chart_breakdown, j, "u3 vanishes");
  }
  check_not_radial(cone_jets(c, m));
}

Mat4 cone_frame_at(const Vec4& u, const Vec4& du, const Vec4& ddu, long node, GroupFactors* factors,
                   double* xi2_formula) {
  double scale = std::max(1.0, u.cwiseAbs().maxCoeff());
  double u3 = u[3];
  if (!(std::abs(u3) > 1e-12 * scale)) throw GeometryError(GeometryFault::chart_breakdown, node, "u3 vanishes");
  double n2 = minkowski_inner(du, du);
  if (!(n2 > 1e-12 * std::max(du.squaredNorm(), 1e-300)))
    throw GeometryError(GeometryFault::radial_point, node, "<u',u'>_J <= 0");

  GroupFactors f;
  f.v = -hat(u) / u3;
  f.alpha = u3;
  Vec2 y = hat(du) - hat(u) * (du[3] / u3);
  double ny = y.norm();
  double c = y[0] / ny, s = y[1] / ny;
  f.A << c, s, -s, c;
  f.xi[0] = -du[3] / (u3 * ny);

  Vec4 z = g_minus(f.v) * ddu;
  double a = f.alpha * z[0];
  if (!(std::abs(a) > 1e-14 * std::max(1.0, z.cwiseAbs().maxCoeff())))
    throw GeometryError(GeometryFault::chart_breakdown, node, "second-order normalization is singular");
  Vec2 az = f.A * hat(z);
  f.xi[1] = -az[1] / a;

  if (xi2_formula) *xi2_formula = det3(u, du, ddu) / (u3 * n2);
  if (factors) *factors = f;
  return f.compose();
}

ConeFrameField cone_frame_from_jets(const ConeJets& j) {
  check_not_radial(j);
  int n = j.grid.size();
  ConeFrameField f{j.grid, std::vector<Mat4>(n), std::vector<GroupFactors>(n), std::vector<double>(n)};
  for (int i = 0; i < n; ++i)
    f.rho[i] = cone_frame_at(j.d[0][i], j.d[1][i], j.d[2][i], i, &f.factors[i], &f.xi2_formula[i]);
  return f;
}

ConeFrameField cone_frame(const ConeCurve& c, DiffMethod m, const Tolerances& tol) {
  for (int j = 0; j < c.size(); ++j) {
    const Vec4& u = c.samples[j];
    if (cone_residual(u) > tol.cone * std::max(1.0, u.squaredNorm()))
      throw GeometryError(GeometryFault::off_cone, j, "sample is off the light cone");
  }
  return cone_frame_from_jets(cone_jets(c, m));
}

double NormalizationReport::max() const { return std::max({c0, c1, c2, a}); }

NormalizationReport normalization_residuals(const ConeCurve& c, const ConeFrameField& f, DiffMethod m) {
  require_same_grid(c.grid, f.grid, "normalization_residuals");
  return normalization_residuals(cone_jets(c, m), f);
}

NormalizationReport normalization_residuals(const ConeJets& j, const ConeFrameField& f) {
  require_same_grid(j.grid, f.grid, "normalization_residuals");
  const auto& c = j.grid;
  NormalizationReport r;
  const Vec4 e4(0, 0, 0, 1);
  for (int i = 0; i < c.size(); ++i) {
    const Mat4& rho = f.rho[i];
    double k0 = std::sqrt(std::max(0.0, minkowski_inner(j.d[1][i], j.d[1][i])));
    Vec4 r0 = rho * j.d[0][i], r1 = rho * j.d[1][i], r2 = rho * j.d[2][i];
    r.c0 = std::max(r.c0, (r0 - e4).norm());
    r.c1 = std::max(r.c1, (r1 - Vec4(0, k0, 0, 0)).norm());
    r.c2 = std::max(r.c2, std::abs(r2[2]));
    r.a = std::max(r.a, std::abs(r2[0] - k0 * k0));
    r.group = std::max(r.group, group_residual(rho));
  }
  return r;
}

ConeInvariants cone_invariants_closed_form(const ConeJets& j, ConeFormula formula) {
  const PeriodicGrid& g = j.grid;
  ConeInvariants k{GridFunction(g), GridFunction(g), GridFunction(g)};
  for (int i = 0; i < g.size(); ++i) {
    const Vec4 &u = j.d[0][i], &u1 = j.d[1][i], &u2 = j.d[2][i], &u3v = j.d[3][i];
    double n2 = minkowski_inner(u1, u1);
    if (!(n2 > 0)) throw GeometryError(GeometryFault::radial_point, i, "<u',u'>_J <= 0");
    if (u[3] == 0.0) throw GeometryError(GeometryFault::chart_breakdown, i, "u3 vanishes");
    double k0 = std::sqrt(n2);
    double p = minkowski_inner(u1, u2);
    double q = minkowski_inner(u2, u2);
    double d2 = det3(u, u1, u2), d3 = det3(u, u1, u3v);
    k.k0[i] = k0;
    if (formula == ConeFormula::arclength) {
      k.k1[i] = (-q * n2 + p * p) / (2 * n2 * n2);
      k.k2[i] = d3 / (u[3] * n2) + 3 * p * d2 / (u[3] * n2 * k0);
    } else {
      double k05 = n2 * n2 * k0;
      k.k1[i] = (p * p - q * n2) / (2 * k05);
      k.k2[i] = d3 / (u[3] * n2 * k0) - 3 * p * d2 / (u[3] * k05);
    }
  }
  return k;
}

ConeInvariants cone_invariants_closed_form(const ConeCurve& c, ConeFormula f, DiffMethod m) {
  return cone_invariants_closed_form(cone_jets(c, m), f);
}

double MaurerCartanField::scale() const {
  double s = 1.0;
  for (const auto& k : K) s = std::max(s, k.max_abs());
  return s;
}

MaurerCartanField maurer_cartan(const FrameField& f, DiffMethod m, double tol_pattern) {
  int n = f.grid.size();
  std::vector<Mat4> drho(n, Mat4::Zero());
  std::vector<double> col(n);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      for (int i = 0; i < n; ++i) col[i] = f.rho[i](r, c);
      auto d = derivative(col, f.grid.length(), 1, m);
      for (int i = 0; i < n; ++i) drho[i](r, c) = d[i];
    }
  MaurerCartanField k{f.grid, std::vector<LorentzAlgebraElement>(n), 0.0};
  for (int i = 0; i < n; ++i) {
    double defect = 0;
    k.K[i] = LorentzAlgebraElement::project(drho[i] * group_inverse(f.rho[i]), &defect);
    k.projection_defect = std::max(k.projection_defect, defect);
  }
  if (k.projection_defect > tol_pattern * k.scale()) {
    std::ostringstream s;
    s << "ProjectionDefect: rho_x rho^-1 is " << k.projection_defect << " away from the algebra";
    throw PatternViolation(true, k.projection_defect, s.str());
  }
  return k;
}

MaurerCartanField maurer_cartan_from_jets(const ConeJets& j, double tol_pattern) {
  int n = j.grid.size();
  MaurerCartanField k{j.grid, std::vector<LorentzAlgebraElement>(n), 0.0};
  for (int i = 0; i < n; ++i) {
    const Vec4 &u = j.d[0][i], &u1 = j.d[1][i], &u2 = j.d[2][i], &u3 = j.d[3][i];
    Mat4 rho = cone_frame_at(u, u1, u2, i), drho, check;
    using detail::seed;
    detail::split(detail::cone_frame_generic(seed<4>(u, u1), seed<4>(u1, u2), seed<4>(u2, u3)), check, drho);
    double defect = 0;
    k.K[i] = LorentzAlgebraElement::project(drho * group_inverse(rho), &defect);
    k.projection_defect = std::max(k.projection_defect, defect);
  }
  if (k.projection_defect > tol_pattern * k.scale()) {
    std::ostringstream s;
    s << "ProjectionDefect: jet-derived rho_x rho^-1 is " << k.projection_defect << " away from the algebra";
    throw PatternViolation(true, k.projection_defect, s.str());
  }
  return k;
}

double cone_pattern_defect(const MaurerCartanField& k) {
  double d = 0;
  for (const auto& e : k.K) d = std::max({d, std::abs(e.a), std::abs(e.b), std::abs(e.z[1])});
  return d / k.scale();
}

double sphere_pattern_defect(const MaurerCartanField& k) {
  double d = 0;
  for (const auto& e : k.K) d = std::max(d, std::abs(e.z[0] + 1.0));
  return std::max(cone_pattern_defect(k), d / k.scale());
}

ConeInvariants invariants_from_frame(const MaurerCartanField& k, double tol_pattern) {
  double defect = cone_pattern_defect(k);
  if (defect > tol_pattern) {
    std::ostringstream s;
    s << "PatternViolation: Maurer-Cartan matrix has relative off-pattern entries of size " << defect;
    throw PatternViolation(false, defect, s.str());
  }
  ConeInvariants out{GridFunction(k.grid), GridFunction(k.grid), GridFunction(k.grid)};
  for (int i = 0; i < k.grid.size(); ++i) {
    out.k0[i] = -k.K[i].z[0];
    out.k1[i] = -k.K[i].w[0];
    out.k2[i] = -k.K[i].w[1];
  }
  return out;
}

MaurerCartanField maurer_cartan_from_invariants(const ConeInvariants& k) {
  require_same_grid(k.k0.grid, k.k1.grid, "maurer_cartan_from_invariants");
  require_same_grid(k.k0.grid, k.k2.grid, "maurer_cartan_from_invariants");
  MaurerCartanField out{k.k0.grid, std::vector<LorentzAlgebraElement>(k.k0.size()), 0.0};
  for (int i = 0; i < k.k0.size(); ++i) {
    out.K[i].z = Vec2(-k.k0[i], 0.0);
    out.K[i].w = Vec2(-k.k1[i], -k.k2[i]);
  }
  return out;
}

ConeCurve reparametrize_arclength(const ConeCurve& c, DiffMethod m) {
  auto jets = cone_jets(c, m);
  int n = c.size();
  std::vector<double> k0(n);
  for (int i = 0; i < n; ++i) {
    double n2 = minkowski_inner(jets.d[1][i], jets.d[1][i]);
    if (!(n2 > 0)) throw GeometryError(GeometryFault::radial_point, i, "<u',u'>_J <= 0");
    k0[i] = std::sqrt(n2);
  }
  double mean = 0;
  for (double x : k0) mean += x;
  mean /= n;
  const double L = c.grid.length();
  auto P = periodic_antiderivative(k0, L);
  PeriodicGrid out_grid(n, mean * L);

  // Solve s(x) = mean x + P(x) = s_j by Newton from x = s_j / mean.
  std::vector<double> x(n);
  for (int j = 0; j < n; ++j) x[j] = out_grid.node(j) / mean;
  for (int it = 0; it < 30; ++it) {
    auto pv = trig_interpolate(P, L, x);
    auto kv = trig_interpolate(k0, L, x);
    double worst = 0;
    for (int j = 0; j < n; ++j) {
      double r = mean * x[j] + pv[j] - out_grid.node(j);
      x[j] -= r / kv[j];
      worst = std::max(worst, std::abs(r));
    }
    if (worst < 1e-15 * std::max(1.0, out_grid.length())) break;
  }
  std::vector<Vec4> s(n);
  for (int comp = 0; comp < 4; ++comp) {
    auto v = trig_interpolate(c.component(comp), L, x);
    for (int j = 0; j < n; ++j) s[j][comp] = v[j];
  }
  return ConeCurve(out_grid, std::move(s));
}

}  // namespace lightcone
