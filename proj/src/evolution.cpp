#include "lightcone/evolution.hpp"

#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace lightcone {

using cplx = std::complex<double>;

KdvScheme parse_kdv_scheme(const std::string& s) {
  if (s == "ifrk4") return KdvScheme::ifrk4;
  if (s == "rk4") return KdvScheme::rk4;
  throw InvalidArgument("unknown scheme '" + s + "' (expected ifrk4 or rk4)");
}

const char* to_string(KdvScheme s) { return s == KdvScheme::ifrk4 ? "ifrk4" : "rk4"; }

// ---- coupled KdV ----

KdvStepper::KdvStepper(const PeriodicGrid& g, double dt, KdvScheme scheme, const KdvOptions& opts)
    : grid_(g), dt_(dt), scheme_(scheme), opts_(opts) {
  if (!(dt > 0)) throw InvalidArgument("KdV step: dt must be positive");
  if (scheme == KdvScheme::rk4 && dt > opts.stability_c * std::pow(g.dx(), 3)) {
    std::ostringstream s;
    s << "StabilityGuard: rk4 needs dt <= " << opts.stability_c << " dx^3 = " << opts.stability_c * std::pow(g.dx(), 3)
      << ", got " << dt;
    throw GuardError(GuardKind::stability, 0.0, s.str());
  }
  int n = g.size();
  wave_.resize(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) wave_[k] = g.wavenumber(k);
  wave_[n / 2] = 0.0;
  auto fill = [&](Spec& e, double sign, double tau) {
    e.resize(n / 2 + 1);
    for (int k = 0; k <= n / 2; ++k) e[k] = std::exp(cplx(0.0, sign * std::pow(wave_[k], 3) * tau));
  };
  // k1_t = -k1''' has symbol +i k^3, k2_t = k2''' has symbol -i k^3.
  fill(e1_half_, 1.0, dt / 2);
  fill(e1_full_, 1.0, dt);
  fill(e2_half_, -1.0, dt / 2);
  fill(e2_full_, -1.0, dt);
}

void KdvStepper::rhs_nonlinear(const Spec& a, const Spec& b, Spec& na, Spec& nb) const {
  int n = grid_.size();
  if (!opts_.nonlinear) {
    na.assign(a.size(), 0.0);
    nb.assign(b.size(), 0.0);
    return;
  }
  Spec da(a.size()), db(b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    da[k] = cplx(0.0, wave_[k]) * a[k];
    db[k] = cplx(0.0, wave_[k]) * b[k];
  }
  auto k1 = irfft(a, n), k2 = irfft(b, n), d1 = irfft(da, n), d2 = irfft(db, n);
  std::vector<double> f1(n), f2(n);
  for (int j = 0; j < n; ++j) {
    f1[j] = 3.0 * (k1[j] * d1[j] + k2[j] * d2[j]);
    f2[j] = d1[j] * k2[j] - k1[j] * d2[j];
  }
  na = rfft(f1);
  nb = rfft(f2);
}

void KdvStepper::rhs_full(const Spec& a, const Spec& b, Spec& na, Spec& nb) const {
  rhs_nonlinear(a, b, na, nb);
  for (size_t k = 0; k < a.size(); ++k) {
    double w3 = std::pow(wave_[k], 3);
    na[k] += cplx(0.0, w3) * a[k];
    nb[k] += cplx(0.0, -w3) * b[k];
  }
}

void KdvStepper::step(std::vector<double>& k1, std::vector<double>& k2, double t) const {
  const int n = grid_.size();
  Spec a = rfft(k1), b = rfft(k2);
  const size_t m = a.size();
  const double h = dt_;
  Spec na1, nb1, na2, nb2, na3, nb3, na4, nb4, ta(m), tb(m);
  if (scheme_ == KdvScheme::ifrk4) {
    rhs_nonlinear(a, b, na1, nb1);
    for (size_t k = 0; k < m; ++k) {
      ta[k] = e1_half_[k] * (a[k] + 0.5 * h * na1[k]);
      tb[k] = e2_half_[k] * (b[k] + 0.5 * h * nb1[k]);
    }
    rhs_nonlinear(ta, tb, na2, nb2);
    for (size_t k = 0; k < m; ++k) {
      ta[k] = e1_half_[k] * a[k] + 0.5 * h * na2[k];
      tb[k] = e2_half_[k] * b[k] + 0.5 * h * nb2[k];
    }
    rhs_nonlinear(ta, tb, na3, nb3);
    for (size_t k = 0; k < m; ++k) {
      ta[k] = e1_full_[k] * a[k] + h * e1_half_[k] * na3[k];
      tb[k] = e2_full_[k] * b[k] + h * e2_half_[k] * nb3[k];
    }
    rhs_nonlinear(ta, tb, na4, nb4);
    for (size_t k = 0; k < m; ++k) {
      a[k] = e1_full_[k] * a[k] +
             h / 6 * (e1_full_[k] * na1[k] + 2.0 * e1_half_[k] * (na2[k] + na3[k]) + na4[k]);
      b[k] = e2_full_[k] * b[k] +
             h / 6 * (e2_full_[k] * nb1[k] + 2.0 * e2_half_[k] * (nb2[k] + nb3[k]) + nb4[k]);
    }
  } else {
    rhs_full(a, b, na1, nb1);
    for (size_t k = 0; k < m; ++k) ta[k] = a[k] + 0.5 * h * na1[k], tb[k] = b[k] + 0.5 * h * nb1[k];
    rhs_full(ta, tb, na2, nb2);
    for (size_t k = 0; k < m; ++k) ta[k] = a[k] + 0.5 * h * na2[k], tb[k] = b[k] + 0.5 * h * nb2[k];
    rhs_full(ta, tb, na3, nb3);
    for (size_t k = 0; k < m; ++k) ta[k] = a[k] + h * na3[k], tb[k] = b[k] + h * nb3[k];
    rhs_full(ta, tb, na4, nb4);
    for (size_t k = 0; k < m; ++k) {
      a[k] += h / 6 * (na1[k] + 2.0 * (na2[k] + na3[k]) + na4[k]);
      b[k] += h / 6 * (nb1[k] + 2.0 * (nb2[k] + nb3[k]) + nb4[k]);
    }
  }
  k1 = irfft(a, n);
  k2 = irfft(b, n);
  for (int j = 0; j < n; ++j)
    if (!std::isfinite(k1[j]) || !std::isfinite(k2[j])) {
      std::ostringstream s;
      s << "BlowupDetected: non-finite state at t = " << t + dt_;
      throw GuardError(GuardKind::blowup, t + dt_, s.str());
    }
}

ConeInvariants kdv_soliton(const PeriodicGrid& g, double beta, double center, double t) {
  double L = g.length(), x0 = center * L + 4 * beta * beta * t;
  auto k1 = GridFunction::sample(g, [&](double x) {
    double s = 0;
    for (int i = -3; i <= 3; ++i) s += -4 * beta * beta / std::pow(std::cosh(beta * (x - x0 + i * L)), 2);
    return s;
  });
  return {GridFunction::constant(g, 1.0), k1, GridFunction::constant(g, 0.0)};
}

ConeInvariants step_kdv(const ConeInvariants& k, double dt, KdvScheme scheme, const KdvOptions& opts) {
  KdvStepper st(k.k1.grid, dt, scheme, opts);
  auto a = k.k1.values, b = k.k2.values;
  st.step(a, b);
  return ConeInvariants{k.k0, GridFunction(k.k1.grid, a), GridFunction(k.k1.grid, b)};
}

namespace {

// Rounded up to a multiple of outputs so that every trajectory with the same t_end and output
// count shares its output times.
int step_count(double t_end, double dt, int outputs) {
  if (!(dt > 0) || !(t_end >= 0)) throw InvalidArgument("time integration needs dt > 0 and t_end >= 0");
  int steps = std::max(1, (int)std::ceil(t_end / dt - 1e-9));
  outputs = std::max(1, outputs);
  return (steps + outputs - 1) / outputs * outputs;
}

std::vector<int> output_steps(int steps, int outputs) {
  outputs = std::max(1, outputs);
  std::vector<int> out;
  for (int i = 0; i <= outputs; ++i) out.push_back(i * (steps / outputs));
  return out;
}

double sup(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (size_t j = 0; j < a.size(); ++j) m = std::max({m, std::abs(a[j]), std::abs(b[j])});
  return m;
}

}  // namespace

Trajectory<ConeInvariants> integrate_kdv(const ConeInvariants& k, double t_end, double dt, KdvScheme scheme,
                                         int outputs, const KdvOptions& opts) {
  int steps = step_count(t_end, dt, outputs);
  double h = t_end / steps;
  KdvStepper st(k.k1.grid, h, scheme, opts);
  auto marks = output_steps(steps, outputs);
  Trajectory<ConeInvariants> tr;
  tr.scheme = to_string(scheme);
  tr.dt = h;
  tr.n = k.k1.size();
  auto a = k.k1.values, b = k.k2.values;
  double limit = opts.blowup_factor * std::max(1.0, sup(a, b));
  size_t next = 0;
  for (int s = 0; s <= steps; ++s) {
    if (next < marks.size() && marks[next] == s) {
      tr.times.push_back(t_end * next / (marks.size() - 1));
      tr.states.push_back({k.k0, GridFunction(k.k1.grid, a), GridFunction(k.k1.grid, b)});
      ++next;
    }
    if (s == steps) break;
    st.step(a, b, s * h);
    if (sup(a, b) > limit) {
      std::ostringstream m;
      m << "BlowupDetected: |k|_inf exceeded " << limit << " at t = " << (s + 1) * h;
      throw GuardError(GuardKind::blowup, (s + 1) * h, m.str());
    }
  }
  return tr;
}

// ---- curve flows ----

ConeInvariants curve_invariants(const ConeJets& j, const SignCalibration& calib) {
  ConeInvariants k = cone_invariants_closed_form(j, ConeFormula::general);
  k.k1 = k.k1 * (double)calib.sigma_cone[0];
  k.k2 = k.k2 * (double)calib.sigma_cone[1];
  return k;
}

CurveFlowRule kdv_rule(const SignCalibration&) {
  return [](const CurveState& s) { return arclength_flow(s.k.k1, s.k.k2, s.k.k0, s.method); };
}

CurveFlowRule kdv_rule_literal(const SignCalibration&) {
  return [](const CurveState& s) {
    return FlowCoefficients{s.k.k1, s.k.k2, derivative(s.k.k1, 1, s.method), false};
  };
}

CurveFlowRule constant_rule(double r1, double r2, double r3) {
  return [=](const CurveState& s) {
    const PeriodicGrid& g = s.curve.grid;
    return FlowCoefficients{GridFunction::constant(g, r1), GridFunction::constant(g, r2),
                            GridFunction::constant(g, r3), r3 == 0.0};
  };
}

namespace {

template <class V>
void truncate_two_thirds(std::vector<V>& v) {
  const int n = (int)v.size();
  for (int comp = 0; comp < (int)V::RowsAtCompileTime; ++comp) {
    std::vector<double> f(n);
    for (int j = 0; j < n; ++j) f[j] = v[j][comp];
    auto spec = rfft(f);
    for (int k = n / 3 + 1; k < (int)spec.size(); ++k) spec[k] = 0.0;
    f = irfft(spec, n);
    for (int j = 0; j < n; ++j) v[j][comp] = f[j];
  }
}

std::vector<Vec4> curve_velocity(const ConeCurve& c, const CurveFlowRule& rule, const SignCalibration& calib,
                                 const CurveFlowOptions& opts) {
  const DiffMethod m = opts.method;
  ConeJets j = cone_jets(c, m);
  ConeFrameField f = cone_frame_from_jets(j);
  ConeInvariants k = curve_invariants(j, calib);
  FlowCoefficients r = rule(CurveState{c, j, f, k, m});
  auto v = assemble_cone_flow(c, f, r);
  if (opts.dealias) truncate_two_thirds(v);
  return v;
}

ConeCurve axpy(const ConeCurve& c, double a, const std::vector<Vec4>& v) {
  std::vector<Vec4> s(c.samples);
  for (size_t j = 0; j < s.size(); ++j) s[j] += a * v[j];
  return ConeCurve(c.grid, std::move(s));
}

SphereCurve axpy(const SphereCurve& c, double a, const std::vector<Vec2>& v) {
  std::vector<Vec2> s(c.samples);
  for (size_t j = 0; j < s.size(); ++j) s[j] += a * v[j];
  return SphereCurve(c.grid, std::move(s));
}

void guard_dt(const PeriodicGrid& g, double dt, const CurveFlowOptions& opts) {
  double lim = opts.stability_c * std::pow(g.dx(), 3);
  if (opts.guard && dt > lim) {
    std::ostringstream s;
    s << "StabilityGuard: curve flow needs dt <= " << opts.stability_c << " dx^3 = " << lim << ", got " << dt;
    throw GuardError(GuardKind::stability, 0.0, s.str());
  }
}

}  // namespace

ConeCurve step_curve_flow(const ConeCurve& c, const CurveFlowRule& rule, double dt, const SignCalibration& calib,
                          const CurveFlowOptions& opts, CurveStepInfo* info) {
  guard_dt(c.grid, dt, opts);
  auto v1 = curve_velocity(c, rule, calib, opts);
  auto v2 = curve_velocity(axpy(c, dt / 2, v1), rule, calib, opts);
  auto v3 = curve_velocity(axpy(c, dt / 2, v2), rule, calib, opts);
  auto v4 = curve_velocity(axpy(c, dt, v3), rule, calib, opts);
  std::vector<Vec4> s(c.samples);
  double worst = 0;
  for (size_t j = 0; j < s.size(); ++j) {
    s[j] += dt / 6 * (v1[j] + 2 * v2[j] + 2 * v3[j] + v4[j]);
    worst = std::max(worst, cone_residual(s[j]));
  }
  CurveStepInfo local;
  local.cone_residual = worst;
  if (opts.reproject && worst > opts.reproject_threshold) {
    for (auto& u : s) u[0] = (u[1] * u[1] + u[2] * u[2]) / (2 * u[3]);
    local.reprojected = true;
  }
  if (info) *info = local;
  return ConeCurve(c.grid, std::move(s));
}

SphereFlowRule sphere_kdv_rule(const SignCalibration& calib) {
  return [calib](const SphereCurve&, const SphereJets& j) {
    SphereInvariants k = sphere_invariants_closed_form(j);
    double a = calib.sigma_corr[0] * calib.sigma_sphere[0], b = calib.sigma_corr[1] * calib.sigma_sphere[1];
    return SphereFlowCoefficients{k.kappa1 * a, k.kappa2 * b};
  };
}

SphereFlowRule sphere_constant_rule(double s1, double s2) {
  return [=](const SphereCurve& c, const SphereJets&) {
    return SphereFlowCoefficients{GridFunction::constant(c.grid, s1), GridFunction::constant(c.grid, s2)};
  };
}

namespace {

std::vector<Vec2> sphere_velocity(const SphereCurve& c, const SphereFlowRule& rule, const CurveFlowOptions& opts) {
  const DiffMethod m = opts.method;
  SphereJets j = sphere_jets(c, m);
  SphereFlowCoefficients s = rule(c, j);
  std::vector<Vec2> v(c.size());
  for (int i = 0; i < c.size(); ++i) {
    if (!(j.d[1][i].squaredNorm() > 1e-24)) throw GeometryError(GeometryFault::degenerate_speed, i, "|m'| = 0");
    v[i] = sphere_velocity_at(j.d[1][i], s.s1[i], s.s2[i]);
  }
  if (opts.dealias) truncate_two_thirds(v);
  return v;
}

}  // namespace

SphereCurve step_sphere_flow(const SphereCurve& c, const SphereFlowRule& rule, double dt,
                             const CurveFlowOptions& opts) {
  guard_dt(c.grid, dt, opts);
  auto v1 = sphere_velocity(c, rule, opts);
  auto v2 = sphere_velocity(axpy(c, dt / 2, v1), rule, opts);
  auto v3 = sphere_velocity(axpy(c, dt / 2, v2), rule, opts);
  auto v4 = sphere_velocity(axpy(c, dt, v3), rule, opts);
  std::vector<Vec2> s(c.samples);
  for (size_t j = 0; j < s.size(); ++j) s[j] += dt / 6 * (v1[j] + 2 * v2[j] + 2 * v3[j] + v4[j]);
  return SphereCurve(c.grid, std::move(s));
}

Trajectory<ConeCurve> integrate_curve_flow(const ConeCurve& c, const CurveFlowRule& rule, double t_end, double dt,
                                           int outputs, const SignCalibration& calib, const CurveFlowOptions& opts,
                                           CurveFlowSummary* summary) {
  int steps = step_count(t_end, dt, outputs);
  double h = t_end / steps;
  guard_dt(c.grid, h, opts);
  auto marks = output_steps(steps, outputs);
  Trajectory<ConeCurve> tr;
  tr.scheme = "rk4";
  tr.dt = h;
  tr.n = c.size();
  CurveFlowSummary sum;
  ConeCurve u = c;
  size_t next = 0;
  for (int s = 0; s <= steps; ++s) {
    if (next < marks.size() && marks[next] == s) {
      tr.times.push_back(t_end * next / (marks.size() - 1));
      tr.states.push_back(u);
      ++next;
    }
    if (s == steps) break;
    CurveStepInfo info;
    try {
      u = step_curve_flow(u, rule, h, calib, opts, &info);
    } catch (const GeometryError& e) {
      std::ostringstream m;
      m << "BlowupDetected: curve flow lost regularity at t = " << (s + 1) * h << " (" << e.what() << ")";
      throw GuardError(GuardKind::blowup, (s + 1) * h, m.str());
    }
    sum.steps++;
    sum.reprojections += info.reprojected;
    sum.max_cone_residual = std::max(sum.max_cone_residual, info.cone_residual);
  }
  if (summary) *summary = sum;
  return tr;
}

Trajectory<SphereCurve> integrate_sphere_flow(const SphereCurve& c, const SphereFlowRule& rule, double t_end,
                                              double dt, int outputs, const CurveFlowOptions& opts) {
  int steps = step_count(t_end, dt, outputs);
  double h = t_end / steps;
  guard_dt(c.grid, h, opts);
  auto marks = output_steps(steps, outputs);
  Trajectory<SphereCurve> tr;
  tr.scheme = "rk4";
  tr.dt = h;
  tr.n = c.size();
  SphereCurve m = c;
  size_t next = 0;
  for (int s = 0; s <= steps; ++s) {
    if (next < marks.size() && marks[next] == s) {
      tr.times.push_back(t_end * next / (marks.size() - 1));
      tr.states.push_back(m);
      ++next;
    }
    if (s == steps) break;
    m = step_sphere_flow(m, rule, h, opts);
  }
  return tr;
}

// ---- frame ODE ----

namespace {

struct AlgebraSeries {
  std::array<std::vector<double>, 6> p;  // a, z1, z2, w1, w2, b

  explicit AlgebraSeries(const std::vector<LorentzAlgebraElement>& k) {
    for (auto& v : p) v.resize(k.size());
    for (size_t j = 0; j < k.size(); ++j) {
      p[0][j] = k[j].a;
      p[1][j] = k[j].z[0];
      p[2][j] = k[j].z[1];
      p[3][j] = k[j].w[0];
      p[4][j] = k[j].w[1];
      p[5][j] = k[j].b;
    }
  }
  AlgebraSeries() = default;
  LorentzAlgebraElement at(size_t j) const { return {p[0][j], Vec2(p[1][j], p[2][j]), Vec2(p[3][j], p[4][j]), p[5][j]}; }
};

AlgebraSeries transform(const AlgebraSeries& s, const std::function<std::vector<double>(const std::vector<double>&)>& f) {
  AlgebraSeries out;
  for (int i = 0; i < 6; ++i) out.p[i] = f(s.p[i]);
  return out;
}

}  // namespace

FrameOdeResult solve_frame_ode(const MaurerCartanField& k, const Mat4& rho0, const FrameOdeOptions& opts) {
  if (opts.substeps < 1) throw InvalidArgument("solve_frame_ode: substeps must be >= 1");
  const int n = k.grid.size();
  const double L = k.grid.length();
  const double h = k.grid.dx() / opts.substeps;
  const double c1 = 0.5 - std::sqrt(3.0) / 6, c2 = 0.5 + std::sqrt(3.0) / 6;
  const double a1 = 0.25 + std::sqrt(3.0) / 6, a2 = 0.25 - std::sqrt(3.0) / 6;
  AlgebraSeries base(k.K);
  std::vector<AlgebraSeries> g1(opts.substeps), g2(opts.substeps);
  for (int s = 0; s < opts.substeps; ++s) {
    g1[s] = transform(base, [&](const std::vector<double>& v) { return fourier_shift(v, L, (s + c1) * h); });
    g2[s] = transform(base, [&](const std::vector<double>& v) { return fourier_shift(v, L, (s + c2) * h); });
  }
  FrameOdeResult r{std::vector<Mat4>(n), Mat4::Identity(), ConeCurve(k.grid, std::vector<Vec4>(n, Vec4(0, 0, 0, 1))),
                   ConeJets{k.grid, {}}, 0.0};
  Mat4 rho = rho0;
  for (int j = 0; j < n; ++j) {
    r.rho[j] = rho;
    for (int s = 0; s < opts.substeps; ++s) {
      LorentzAlgebraElement K1 = g1[s].at(j), K2 = g2[s].at(j);
      Mat4 first = exp_algebra((K1 * a1 + K2 * a2) * h).matrix();
      Mat4 second = exp_algebra((K1 * a2 + K2 * a1) * h).matrix();
      rho = opts.convention == FrameConvention::k_left ? Mat4(second * first * rho) : Mat4(rho * first * second);
    }
  }
  r.rho_end = rho;

  AlgebraSeries d1 = transform(base, [&](const std::vector<double>& v) { return spectral_derivative(v, L, 1); });
  AlgebraSeries d2 = transform(base, [&](const std::vector<double>& v) { return spectral_derivative(v, L, 2); });
  for (auto& d : r.jets.d) d.assign(n, Vec4::Zero());
  const Vec4 e4(0, 0, 0, 1);
  for (int j = 0; j < n; ++j) {
    Mat4 K = base.at(j).matrix(), dK = d1.at(j).matrix(), ddK = d2.at(j).matrix();
    Mat4 inv = group_inverse(r.rho[j]);
    // u^(n) = ρ⁻¹ w_n with w_0 = e4, w_{n+1} = w_n' - K w_n.
    Vec4 w1 = -K * e4;
    Vec4 dw1 = -dK * e4;
    Vec4 w2 = dw1 - K * w1;
    Vec4 dw2 = -ddK * e4 - dK * w1 - K * dw1;
    Vec4 w3 = dw2 - K * w2;
    r.curve.samples[j] = inv * e4;
    r.jets.d[0][j] = r.curve.samples[j];
    r.jets.d[1][j] = inv * w1;
    r.jets.d[2][j] = inv * w2;
    r.jets.d[3][j] = inv * w3;
    r.group_residual = std::max(r.group_residual, group_residual(r.rho[j]));
  }
  r.group_residual = std::max(r.group_residual, group_residual(r.rho_end));
  return r;
}

namespace {

double nearest(const std::complex<double>& z, const std::array<std::complex<double>, 4>& set) {
  double m = 1e300;
  for (const auto& w : set) m = std::min(m, std::abs(z - w));
  return m;
}

}  // namespace

Monodromy monodromy(const Mat4& rho_start, const Mat4& rho_end) {
  Monodromy m;
  m.matrix = rho_end * group_inverse(rho_start);
  m.group_residual = group_residual(m.matrix);
  Eigen::EigenSolver<Mat4> es(m.matrix, false);
  for (int i = 0; i < 4; ++i) m.eigenvalues[i] = es.eigenvalues()[i];
  std::sort(m.eigenvalues.begin(), m.eigenvalues.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  for (const auto& z : m.eigenvalues) {
    m.conjugation_defect = std::max(m.conjugation_defect, nearest(std::conj(z), m.eigenvalues));
    m.reciprocal_defect = std::max(m.reciprocal_defect, nearest(1.0 / z, m.eigenvalues));
  }
  return m;
}

Monodromy monodromy(const FrameOdeResult& r) { return monodromy(r.rho[0], r.rho_end); }

nlohmann::json Monodromy::to_json() const {
  nlohmann::json ev = nlohmann::json::array();
  for (const auto& z : eigenvalues) ev.push_back({{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}});
  return {{"matrix", io::matrix_json(matrix)},
          {"eigenvalues", ev},
          {"group_residual", group_residual},
          {"conjugation_defect", conjugation_defect},
          {"reciprocal_defect", reciprocal_defect}};
}

double eigenvalue_drift(const Monodromy& a, const Monodromy& b) {
  std::array<int, 4> p{0, 1, 2, 3};
  double best = 1e300;
  do {
    double d = 0;
    for (int i = 0; i < 4; ++i) d = std::max(d, std::abs(a.eigenvalues[i] - b.eigenvalues[p[i]]));
    best = std::min(best, d);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

double chart_margin(const ConeCurve& u) {
  double m = 1e300;
  for (const auto& s : u.samples) m = std::min(m, s[3] / s.norm());
  return m;
}

Mat4 chart_transform(const ConeCurve& u, int candidates) {
  Mat4 best = Mat4::Identity();
  double margin = chart_margin(u);
  for (int seed = 0; seed < candidates; ++seed) {
    Mat4 theta = random_lorentz((std::uint64_t)seed, 1.0).matrix();
    double m = chart_margin(apply_lorentz(theta, u));
    if (m > margin) margin = m, best = theta;
  }
  return best;
}

ConeJets apply_lorentz(const Mat4& theta, const ConeJets& j) {
  ConeJets out = j;
  for (auto& d : out.d)
    for (auto& v : d) v = theta * v;
  return out;
}

IsospectralReport monodromy_along_kdv(const ConeInvariants& k, double t_end, double dt, KdvScheme scheme,
                                      const FrameOdeOptions& opts) {
  auto tr = integrate_kdv(k, t_end, dt, scheme, 1);
  IsospectralReport r;
  r.start = monodromy(solve_frame_ode(maurer_cartan_from_invariants(k), Mat4::Identity(), opts));
  r.end = monodromy(solve_frame_ode(maurer_cartan_from_invariants(tr.states.back()), Mat4::Identity(), opts));
  r.drift = eigenvalue_drift(r.start, r.end);
  return r;
}

double congruence_residual(const ConeCurve& original, const Mat4& rho_true0, const FrameOdeResult& rec) {
  require_same_grid(original.grid, rec.curve.grid, "congruence_residual");
  Mat4 theta = group_inverse(rho_true0) * rec.rho[0];
  double d = 0;
  for (int j = 0; j < original.size(); ++j)
    d = std::max(d, (original.samples[j] - theta * rec.curve.samples[j]).norm());
  return d;
}

// ---- realization experiment ----

nlohmann::json RealizationReport::to_json() const {
  return {{"n", n},
          {"t_end", t_end},
          {"dt", dt},
          {"dt_kdv", dt_kdv},
          {"steps", steps},
          {"reprojections", reprojections},
          {"k0_drift", k0_drift},
          {"k0_drift_rate", k0_drift_rate},
          {"kdv_rel_l2", kdv_rel_l2},
          {"kdv_rel_l2_series", kdv_rel_l2_series},
          {"invariant_spread", invariant_spread},
          {"sphere_dev", sphere_dev},
          {"literal_k0_drift_rate", literal_k0_drift_rate},
          {"monodromy_drift", monodromy_drift},
          {"h_drift", h_drift},
          {"mass_drift", mass_drift},
          {"max_cone_residual", max_cone_residual},
          {"times", times}};
}

namespace {

double rel_l2(const ConeInvariants& a, const ConeInvariants& b) {
  GridFunction d1 = a.k1 - b.k1, d2 = a.k2 - b.k2;
  double num = inner(d1, d1) + inner(d2, d2);
  double den = inner(b.k1, b.k1) + inner(b.k2, b.k2);
  return std::sqrt(num / std::max(den, 1e-300));
}

double sup_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0;
  for (int j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

RealizationReport run_realization_experiment(const SphereCurve& initial, const SignCalibration& calib,
                                             const RealizationOptions& opts) {
  RealizationReport rep;
  const PeriodicGrid& g = initial.grid;
  rep.n = g.size();
  rep.t_end = opts.t_end;
  double dt = opts.dt > 0 ? opts.dt : 0.5 * opts.flow.stability_c * std::pow(g.dx(), 3);
  ConeCurve u0 = lift_arclength(initial, opts.method);
  ConeInvariants k_init = curve_invariants(cone_jets(u0, opts.method), calib);

  auto kdv = integrate_kdv(k_init, opts.t_end, opts.dt_kdv, opts.kdv_scheme, opts.outputs);
  rep.dt_kdv = kdv.dt;
  CurveFlowSummary sum;
  auto curve = integrate_curve_flow(u0, kdv_rule(calib), opts.t_end, dt, opts.outputs, calib, opts.flow, &sum);
  rep.dt = curve.dt;
  rep.steps = sum.steps;
  rep.reprojections = sum.reprojections;
  rep.max_cone_residual = sum.max_cone_residual;
  rep.times = curve.times;
  if (curve.times.size() != kdv.times.size())
    throw Error("realization: curve and KdV trajectories have different output times");

  ConeInvariants k_start = curve_invariants(cone_jets(curve.states[0], opts.method), calib);
  for (size_t t = 0; t < curve.times.size(); ++t) {
    ConeInvariants kc = curve_invariants(cone_jets(curve.states[t], opts.method), calib);
    rep.k0_drift = std::max(rep.k0_drift, sup_diff(kc.k0, k_start.k0));
    rep.invariant_spread =
        std::max({rep.invariant_spread, sup_diff(kc.k1, k_start.k1), sup_diff(kc.k2, k_start.k2)});
    rep.kdv_rel_l2_series.push_back(rel_l2(kc, kdv.states[t]));
    if (opts.keep_states) rep.curve_k.push_back(kc);
  }
  if (opts.keep_states) {
    rep.curve_states = curve.states;
    rep.kdv_states = kdv.states;
  }
  rep.kdv_rel_l2 = rep.kdv_rel_l2_series.back();
  rep.k0_drift_rate = opts.t_end > 0 ? rep.k0_drift / opts.t_end : 0;

  const auto& kf = kdv.states.back();
  rep.h_drift = std::abs(hamiltonian_h(kf.k1, kf.k2) - hamiltonian_h(k_init.k1, k_init.k2));
  rep.mass_drift = std::abs(integrate(kf.k1) - integrate(k_init.k1));

  if (opts.run_sphere) {
    auto sph = integrate_sphere_flow(initial, sphere_kdv_rule(calib), opts.t_end, dt, opts.outputs, opts.flow);
    rep.sphere_dev = correspond_flow(curve.times, curve.states, sph.states).max();
  }
  if (opts.run_literal) {
    auto lit = integrate_curve_flow(u0, kdv_rule_literal(calib), opts.literal_t_end, dt, 1, calib, opts.flow);
    ConeInvariants kl = curve_invariants(cone_jets(lit.states.back(), opts.method), calib);
    rep.literal_k0_drift_rate = sup_diff(kl.k0, k_start.k0) / opts.literal_t_end;
  }
  if (opts.run_monodromy) {
    auto m0 = monodromy(solve_frame_ode(maurer_cartan_from_invariants(k_init), Mat4::Identity()));
    auto m1 = monodromy(solve_frame_ode(maurer_cartan_from_invariants(kf), Mat4::Identity()));
    rep.monodromy_drift = eigenvalue_drift(m0, m1);  // closed initial curves give m = I
  }
  return rep;
}

RealizationReport run_realization_experiment(const ConeCurve& initial, const SignCalibration& calib,
                                             const RealizationOptions& opts) {
  ConeCurve u = initial;
  auto k = cone_invariants_closed_form(u, ConeFormula::general, opts.method);
  bool unit = true;
  for (int j = 0; j < k.k0.size(); ++j) unit = unit && std::abs(k.k0[j] - 1.0) <= 1e-8;
  if (!unit) u = reparametrize_arclength(u, opts.method);
  return run_realization_experiment(project(u), calib, opts);
}

}  // namespace lightcone
