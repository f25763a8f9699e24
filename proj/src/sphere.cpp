#include "lightcone/sphere.hpp"

#include "lightcone/errors.hpp"

#include "frame_ad.hpp"

#include <cmath>
#include <sstream>

namespace lightcone {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

std::array<Vec4, 4> lifted_jet(const std::array<Vec2, 4>& m) {
  const Vec2 &p = m[0], &d1 = m[1], &d2 = m[2], &d3 = m[3];
  return {Vec4(0.5 * p.squaredNorm(), p[0], p[1], 1.0), Vec4(p.dot(d1), d1[0], d1[1], 0.0),
          Vec4(d1.squaredNorm() + p.dot(d2), d2[0], d2[1], 0.0),
          Vec4(3 * d1.dot(d2) + p.dot(d3), d3[0], d3[1], 0.0)};
}

void check_speed(const Vec2& dm, long node) {
  if (!(dm.squaredNorm() > 1e-24)) throw GeometryError(GeometryFault::degenerate_speed, node, "|m'| = 0");
}

}  // namespace

SphereCurve::SphereCurve(const PeriodicGrid& g, std::vector<Vec2> s) : grid(g), samples(std::move(s)) {
  if ((int)samples.size() != g.size())
    throw GridMismatch("SphereCurve: " + std::to_string(samples.size()) + " samples for " +
                       std::to_string(g.size()) + " nodes");
  for (size_t j = 0; j < samples.size(); ++j)
    if (!samples[j].allFinite()) throw GeometryError(GeometryFault::non_finite, (long)j, "non-finite sample");
}

std::vector<double> SphereCurve::component(int c) const {
  std::vector<double> v(samples.size());
  for (size_t j = 0; j < samples.size(); ++j) v[j] = samples[j][c];
  return v;
}

SphereJets sphere_jets(const SphereCurve& c, DiffMethod m, Warnings* warnings) {
  SphereJets j{c.grid, {}};
  for (auto& d : j.d) d.assign(c.size(), Vec2::Zero());
  for (int comp = 0; comp < 2; ++comp) {
    auto col = c.component(comp);
    if (warnings && m == DiffMethod::spectral && !spectrum_resolved(col))
      warnings->add("UnresolvedSpectrum: sphere curve component m" + std::to_string(comp + 1));
    auto jet = derivative_jet(col, c.grid.length(), 3, m);
    for (int o = 0; o < 4; ++o)
      for (int i = 0; i < c.size(); ++i) j.d[o][i][comp] = jet[o][i];
  }
  return j;
}

void validate_sphere_curve(const SphereCurve& c, DiffMethod m) {
  auto j = sphere_jets(c, m);
  for (int i = 0; i < c.size(); ++i) check_speed(j.d[1][i], i);
}

Vec2 moebius_apply(const GroupFactors& f, const Vec2& m, long node) {
  Vec2 q = m + f.v;
  double p = 0.5 * q.squaredNorm();  // ½|m|² + v·m + ½|v|²
  Vec2 Aq = f.A * q;
  double den = 0.5 * f.alpha * f.xi.squaredNorm() * p + f.xi.dot(Aq) + 1.0 / f.alpha;
  Vec2 num = f.alpha * f.xi * p + Aq;
  if (!(std::abs(den) > 1e-12 * std::max(1.0, num.norm())))
    throw GeometryError(GeometryFault::chart_breakdown, node, "point is sent to infinity of the chart");
  return num / den;
}

SphereCurve moebius_apply(const Mat4& theta, const SphereCurve& c) {
  GroupFactors f = factor(theta);
  std::vector<Vec2> s(c.size());
  for (int j = 0; j < c.size(); ++j) s[j] = moebius_apply(f, c.samples[j], j);
  return SphereCurve(c.grid, std::move(s));
}

SphereCurve moebius_apply_projective(const Mat4& theta, const SphereCurve& c) {
  std::vector<Vec2> s(c.size());
  for (int j = 0; j < c.size(); ++j) {
    const Vec2& m = c.samples[j];
    Vec4 u = theta * Vec4(0.5 * m.squaredNorm(), m[0], m[1], 1.0);
    if (!(std::abs(u[3]) > 1e-12 * std::max(1.0, u.norm())))
      throw GeometryError(GeometryFault::chart_breakdown, j, "point is sent to infinity of the chart");
    s[j] = Vec2(u[1], u[2]) / u[3];
  }
  return SphereCurve(c.grid, std::move(s));
}

Mat4 sphere_frame_at(const Vec2& m, const Vec2& dm, const Vec2& ddm, long node, GroupFactors* factors) {
  check_speed(dm, node);
  double s2 = dm.squaredNorm(), s = std::sqrt(s2);
  GroupFactors f;
  f.v = -m;
  f.alpha = 1.0 / s;
  f.A << dm[0] / s, dm[1] / s, -dm[1] / s, dm[0] / s;
  f.xi = Vec2(dm.dot(ddm) / s2, -cross(dm, ddm) / s2);
  if (factors) *factors = f;
  return f.compose();
}

FrameField sphere_frame_from_jets(const SphereJets& j) {
  int n = j.grid.size();
  FrameField f{j.grid, std::vector<Mat4>(n), std::vector<GroupFactors>(n), {}};
  for (int i = 0; i < n; ++i) f.rho[i] = sphere_frame_at(j.d[0][i], j.d[1][i], j.d[2][i], i, &f.factors[i]);
  return f;
}

FrameField sphere_frame(const SphereCurve& c, DiffMethod m) { return sphere_frame_from_jets(sphere_jets(c, m)); }

std::array<Vec2, 4> image_jet(const Mat4& rho, const std::array<Vec2, 4>& mjet, long node) {
  auto lj = lifted_jet(mjet);
  std::array<Vec2, 4> P;
  std::array<double, 4> q;
  for (int k = 0; k < 4; ++k) {
    Vec4 U = rho * lj[k];
    P[k] = Vec2(U[1], U[2]);
    q[k] = U[3];
  }
  if (!(std::abs(q[0]) > 1e-12)) throw GeometryError(GeometryFault::chart_breakdown, node, "image leaves the chart");
  // P = n q, differentiated by Leibniz.
  std::array<Vec2, 4> n;
  n[0] = P[0] / q[0];
  n[1] = (P[1] - n[0] * q[1]) / q[0];
  n[2] = (P[2] - 2 * n[1] * q[1] - n[0] * q[2]) / q[0];
  n[3] = (P[3] - 3 * n[2] * q[1] - 3 * n[1] * q[2] - n[0] * q[3]) / q[0];
  return n;
}

NormalizedImage normalized_image(const SphereCurve& c, int node, DiffMethod m) {
  if (node < 0 || node >= c.size()) throw InvalidArgument("normalized_image: node out of range");
  auto j = sphere_jets(c, m);
  GroupFactors f;
  Mat4 rho = sphere_frame_at(j.d[0][node], j.d[1][node], j.d[2][node], node, &f);
  NormalizedImage out{c, std::vector<bool>(c.size(), true), node, {}};
  for (int i = 0; i < c.size(); ++i) {
    try {
      out.image.samples[i] = moebius_apply(f, c.samples[i], i);
    } catch (const GeometryError&) {
      out.image.samples[i] = Vec2::Zero();
      out.in_chart[i] = false;
    }
  }
  out.jet = image_jet(rho, {j.d[0][node], j.d[1][node], j.d[2][node], j.d[3][node]}, node);
  return out;
}

NormalizationReport sphere_normalization_residuals(const SphereCurve& c, const FrameField& f, DiffMethod m) {
  require_same_grid(c.grid, f.grid, "sphere_normalization_residuals");
  auto j = sphere_jets(c, m);
  NormalizationReport r;
  for (int i = 0; i < c.size(); ++i) {
    auto n = image_jet(f.rho[i], {j.d[0][i], j.d[1][i], j.d[2][i], j.d[3][i]}, i);
    r.c0 = std::max(r.c0, n[0].norm());
    r.c1 = std::max(r.c1, (n[1] - Vec2(1, 0)).norm());
    r.c2 = std::max(r.c2, n[2].norm());
    r.group = std::max(r.group, group_residual(f.rho[i]));
  }
  return r;
}

SphereInvariants sphere_invariants_closed_form(const SphereJets& j) {
  SphereInvariants k{GridFunction(j.grid), GridFunction(j.grid)};
  for (int i = 0; i < j.grid.size(); ++i) {
    const Vec2 &d1 = j.d[1][i], &d2 = j.d[2][i], &d3 = j.d[3][i];
    check_speed(d1, i);
    double s2 = d1.squaredNorm(), s4 = s2 * s2;
    double dot12 = d1.dot(d2), det12 = cross(d1, d2);
    k.kappa1[i] = d1.dot(d3) / s2 - 1.5 * dot12 * dot12 / s4 + 1.5 * det12 * det12 / s4;
    k.kappa2[i] = cross(d1, d3) / s2 - 3 * dot12 * det12 / s4;
  }
  return k;
}

SphereInvariants sphere_invariants_closed_form(const SphereCurve& c, DiffMethod m) {
  return sphere_invariants_closed_form(sphere_jets(c, m));
}

SphereInvariants sphere_invariants_from_image(const SphereCurve& c, DiffMethod m) {
  auto j = sphere_jets(c, m);
  SphereInvariants k{GridFunction(c.grid), GridFunction(c.grid)};
  for (int i = 0; i < c.size(); ++i) {
    Mat4 rho = sphere_frame_at(j.d[0][i], j.d[1][i], j.d[2][i], i);
    auto n = image_jet(rho, {j.d[0][i], j.d[1][i], j.d[2][i], j.d[3][i]}, i);
    k.kappa1[i] = n[3][0];
    k.kappa2[i] = n[3][1];
  }
  return k;
}

SphereInvariants sphere_invariants_from_frame(const MaurerCartanField& k, double tol_pattern) {
  double defect = sphere_pattern_defect(k);
  if (defect > tol_pattern) {
    std::ostringstream s;
    s << "PatternViolation: sphere Maurer-Cartan matrix has relative off-pattern entries of size " << defect;
    throw PatternViolation(false, defect, s.str());
  }
  SphereInvariants out{GridFunction(k.grid), GridFunction(k.grid)};
  for (int i = 0; i < k.grid.size(); ++i) {
    out.kappa1[i] = -k.K[i].w[0];
    out.kappa2[i] = -k.K[i].w[1];
  }
  return out;
}

MaurerCartanField sphere_maurer_cartan_from_jets(const SphereJets& j, double tol_pattern) {
  const int n = j.grid.size();
  MaurerCartanField k{j.grid, std::vector<LorentzAlgebraElement>(n), 0.0};
  for (int i = 0; i < n; ++i) {
    const Vec2 &m = j.d[0][i], &m1 = j.d[1][i], &m2 = j.d[2][i], &m3 = j.d[3][i];
    Mat4 rho = sphere_frame_at(m, m1, m2, i), drho, check;
    using detail::seed;
    detail::split(detail::sphere_frame_generic(seed<2>(m, m1), seed<2>(m1, m2), seed<2>(m2, m3)), check, drho);
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

SphereInvariants sphere_invariants_from_frame(const SphereCurve& c, DiffMethod m, double tol_pattern,
                                              MaurerCartanField* k_out) {
  auto k = maurer_cartan(sphere_frame(c, m), m, tol_pattern);
  auto out = sphere_invariants_from_frame(k, tol_pattern);
  if (k_out) *k_out = std::move(k);
  return out;
}

}  // namespace lightcone
