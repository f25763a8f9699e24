#include "lightcone/correspondence.hpp"

#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/io.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace lightcone {

SphereCurve project(const ConeCurve& c) {
  std::vector<Vec2> s(c.size());
  for (int j = 0; j < c.size(); ++j) {
    const Vec4& u = c.samples[j];
    if (!(std::abs(u[3]) > 1e-300)) throw GeometryError(GeometryFault::chart_breakdown, j, "u3 vanishes");
    s[j] = Vec2(u[1] / u[3], u[2] / u[3]);
  }
  return SphereCurve(c.grid, std::move(s));
}

ConeCurve lift_standard(const SphereCurve& c) {
  std::vector<Vec4> s(c.size());
  for (int j = 0; j < c.size(); ++j) {
    const Vec2& m = c.samples[j];
    s[j] = Vec4(0.5 * m.squaredNorm(), m[0], m[1], 1.0);
  }
  return ConeCurve(c.grid, std::move(s));
}

ConeCurve lift_arclength(const SphereCurve& c, DiffMethod m) {
  auto j = sphere_jets(c, m);
  ConeCurve u = lift_standard(c);
  for (int i = 0; i < c.size(); ++i) {
    double s = j.d[1][i].norm();
    if (!(s > 1e-12)) throw GeometryError(GeometryFault::degenerate_speed, i, "|m'| = 0");
    u.samples[i] /= s;
  }
  return u;
}

ConeJets lift_arclength_jets(const SphereCurve& c, DiffMethod dm) {
  const int n = c.size();
  std::array<std::vector<Vec2>, 5> d;
  for (auto& v : d) v.assign(n, Vec2::Zero());
  for (int comp = 0; comp < 2; ++comp) {
    auto jet = derivative_jet(c.component(comp), c.grid.length(), 4, dm);
    for (int o = 0; o < 5; ++o)
      for (int i = 0; i < n; ++i) d[o][i][comp] = jet[o][i];
  }
  ConeJets out{c.grid, {}};
  for (auto& v : out.d) v.assign(n, Vec4::Zero());
  for (int i = 0; i < n; ++i) {
    const Vec2 &m = d[0][i], &m1 = d[1][i], &m2 = d[2][i], &m3 = d[3][i], &m4 = d[4][i];
    // m̃ = (|m|²/2, m, 1) and its derivatives.
    std::array<Vec4, 4> t;
    t[0] << 0.5 * m.squaredNorm(), m[0], m[1], 1.0;
    t[1] << m.dot(m1), m1[0], m1[1], 0.0;
    t[2] << m1.squaredNorm() + m.dot(m2), m2[0], m2[1], 0.0;
    t[3] << 3 * m1.dot(m2) + m.dot(m3), m3[0], m3[1], 0.0;
    // φ = q^(-1/2) with q = |m'|².
    double q = m1.squaredNorm();
    if (!(q > 1e-24)) throw GeometryError(GeometryFault::degenerate_speed, i, "|m'| = 0");
    double q1 = 2 * m1.dot(m2), q2 = 2 * (m2.squaredNorm() + m1.dot(m3)), q3 = 2 * (3 * m2.dot(m3) + m1.dot(m4));
    double p1 = std::pow(q, -0.5), p3 = std::pow(q, -1.5), p5 = std::pow(q, -2.5), p7 = std::pow(q, -3.5);
    std::array<double, 4> phi{p1, -0.5 * p3 * q1, 0.75 * p5 * q1 * q1 - 0.5 * p3 * q2,
                              -1.875 * p7 * q1 * q1 * q1 + 2.25 * p5 * q1 * q2 - 0.5 * p3 * q3};
    out.d[0][i] = phi[0] * t[0];
    out.d[1][i] = phi[0] * t[1] + phi[1] * t[0];
    out.d[2][i] = phi[0] * t[2] + 2 * phi[1] * t[1] + phi[2] * t[0];
    out.d[3][i] = phi[0] * t[3] + 3 * phi[1] * t[2] + 3 * phi[2] * t[1] + phi[3] * t[0];
  }
  return out;
}

namespace {

nlohmann::json signs_json(const Signs& s) { return nlohmann::json::array({s[0], s[1]}); }

Signs signs_from(const nlohmann::json& j, const char* key) {
  auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2) throw SchemaError(std::string("calibration: ") + key + " needs two entries");
  for (int x : v)
    if (x != 1 && x != -1) throw SchemaError(std::string("calibration: ") + key + " entries must be +1 or -1");
  return {v[0], v[1]};
}

double max_dev(const GridFunction& a, const GridFunction& b, double sign) {
  double d = 0;
  for (int j = 0; j < a.size(); ++j) d = std::max(d, std::abs(a[j] - sign * b[j]));
  return d;
}

}  // namespace

nlohmann::json SignCalibration::to_json() const {
  return {{"sigma_cone", signs_json(sigma_cone)}, {"sigma_sphere", signs_json(sigma_sphere)},
          {"sigma_corr", signs_json(sigma_corr)}, {"curves", curves},
          {"N", N},                               {"max_dev", max_dev}};
}

SignCalibration SignCalibration::from_json(const nlohmann::json& j) {
  try {
    SignCalibration c;
    c.sigma_cone = signs_from(j, "sigma_cone");
    c.sigma_corr = signs_from(j, "sigma_corr");
    c.sigma_sphere = j.contains("sigma_sphere") ? signs_from(j, "sigma_sphere") : Signs{1, 1};
    c.curves = j.at("curves").get<std::vector<std::string>>();
    c.N = j.at("N").get<std::vector<int>>();
    c.max_dev = j.at("max_dev").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("calibration JSON: ") + e.what());
  }
}

SignCalibration SignCalibration::load(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const IoError&) {
    throw CalibrationError(CalibrationFault::missing, "calibration file not found: " + path);
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return from_json(j);
}

void SignCalibration::save(const std::string& path) const { io::write_atomic(path, to_json().dump(2) + "\n"); }

bool SignCalibration::same_signs(const SignCalibration& o) const {
  return sigma_cone == o.sigma_cone && sigma_sphere == o.sigma_sphere && sigma_corr == o.sigma_corr;
}

CalibrationSample measure_signs(const LabeledCurve& lc, DiffMethod m) {
  CalibrationSample s;
  s.curve = lc.name;
  s.n = lc.curve.size();
  ConeJets uj = lift_arclength_jets(lc.curve, m);
  auto cone_fr = invariants_from_frame(maurer_cartan_from_jets(uj));
  auto cone_cf = cone_invariants_closed_form(uj, ConeFormula::arclength);
  auto sj = sphere_jets(lc.curve, m);
  auto sph_fr = sphere_invariants_from_frame(sphere_maurer_cartan_from_jets(sj));
  auto sph_cf = sphere_invariants_closed_form(sj);
  const GridFunction* kf[2] = {&cone_fr.k1, &cone_fr.k2};
  const GridFunction* kc[2] = {&cone_cf.k1, &cone_cf.k2};
  const GridFunction* sf[2] = {&sph_fr.kappa1, &sph_fr.kappa2};
  const GridFunction* sc[2] = {&sph_cf.kappa1, &sph_cf.kappa2};
  for (int i = 0; i < 2; ++i) {
    s.cone_plus[i] = max_dev(*kc[i], *kf[i], 1);
    s.cone_minus[i] = max_dev(*kc[i], *kf[i], -1);
    s.sphere_plus[i] = max_dev(*sc[i], *sf[i], 1);
    s.sphere_minus[i] = max_dev(*sc[i], *sf[i], -1);
    s.corr_plus[i] = max_dev(*kf[i], *sf[i], 1);
    s.corr_minus[i] = max_dev(*kf[i], *sf[i], -1);
  }
  return s;
}

namespace {

// Picks the sign with the smaller worst-case deviation and demands that it fits and the other does not.
int resolve(const char* relation, int comp, const std::vector<CalibrationSample>& samples,
            std::array<double, 2> CalibrationSample::*plus, std::array<double, 2> CalibrationSample::*minus,
            double tol, double& worst) {
  double p = 0, m = 0;
  for (const auto& s : samples) {
    p = std::max(p, (s.*plus)[comp]);
    m = std::max(m, (s.*minus)[comp]);
  }
  double best = std::min(p, m);
  std::ostringstream msg;
  msg << relation << " component " << comp + 1 << ": deviation " << p << " for +1, " << m << " for -1";
  if (best > tol) throw CalibrationError(CalibrationFault::inconsistent, "no sign fits every curve; " + msg.str());
  if (std::max(p, m) <= tol)
    throw CalibrationError(CalibrationFault::insufficient, "both signs fit, curves do not separate them; " + msg.str());
  worst = std::max(worst, best);
  return p <= m ? 1 : -1;
}

}  // namespace

SignCalibration calibrate(const std::vector<LabeledCurve>& curves, double tol, DiffMethod m,
                          std::vector<CalibrationSample>* samples_out) {
  std::set<std::string> distinct;
  for (const auto& c : curves) distinct.insert(c.name);
  if (distinct.size() < 3)
    throw CalibrationError(CalibrationFault::insufficient,
                           "calibration needs at least 3 distinct curves, got " + std::to_string(distinct.size()));
  std::vector<CalibrationSample> samples;
  for (const auto& c : curves) samples.push_back(measure_signs(c, m));
  SignCalibration cal;
  using S = CalibrationSample;
  for (int i = 0; i < 2; ++i) {
    cal.sigma_cone[i] = resolve("cone closed form vs frame", i, samples, &S::cone_plus, &S::cone_minus, tol, cal.max_dev);
    cal.sigma_sphere[i] =
        resolve("sphere closed form vs frame", i, samples, &S::sphere_plus, &S::sphere_minus, tol, cal.max_dev);
    cal.sigma_corr[i] = resolve("cone frame vs sphere frame", i, samples, &S::corr_plus, &S::corr_minus, tol, cal.max_dev);
  }
  cal.curves.assign(distinct.begin(), distinct.end());
  std::set<int> ns;
  for (const auto& c : curves) ns.insert(c.curve.size());
  cal.N.assign(ns.begin(), ns.end());
  if (samples_out) *samples_out = std::move(samples);
  return cal;
}

SignCalibration calibrate(const std::vector<std::string>& names, const std::vector<int>& ns, double tol,
                          DiffMethod m, std::vector<CalibrationSample>* samples) {
  std::vector<LabeledCurve> curves;
  for (int n : ns)
    for (const auto& name : names) curves.push_back({name, curves::sphere(name, n)});
  SignCalibration cal = calibrate(curves, tol, m, samples);
  cal.curves = names;
  return cal;
}

double MatchReport::max() const { return std::max(signed_dev[0], signed_dev[1]); }

MatchReport match_invariants(const SphereCurve& m, const SignCalibration& calib, DiffMethod dm, double tol_pattern) {
  auto k = invariants_from_frame(maurer_cartan_from_jets(lift_arclength_jets(m, dm), tol_pattern), tol_pattern);
  auto kappa = sphere_invariants_from_frame(sphere_maurer_cartan_from_jets(sphere_jets(m, dm), tol_pattern), tol_pattern);
  MatchReport r;
  const GridFunction* kk[2] = {&k.k1, &k.k2};
  const GridFunction* ss[2] = {&kappa.kappa1, &kappa.kappa2};
  for (int i = 0; i < 2; ++i) {
    r.signed_dev[i] = max_dev(*kk[i], *ss[i], calib.sigma_corr[i]);
    for (int j = 0; j < m.size(); ++j)
      r.abs_dev[i] = std::max(r.abs_dev[i], std::abs(std::abs((*kk[i])[j]) - std::abs((*ss[i])[j])));
  }
  for (int j = 0; j < m.size(); ++j) r.k0_dev = std::max(r.k0_dev, std::abs(k.k0[j] - 1.0));
  return r;
}

double FlowCorrespondenceReport::max() const {
  double d = 0;
  for (double x : dev) d = std::max(d, x);
  return d;
}

FlowCorrespondenceReport correspond_flow(const std::vector<double>& times, const std::vector<ConeCurve>& u,
                                         const std::vector<SphereCurve>& m) {
  if (u.size() != m.size() || u.size() != times.size())
    throw GridMismatch("correspond_flow: trajectories have different numbers of time slices");
  FlowCorrespondenceReport r;
  for (size_t t = 0; t < u.size(); ++t) {
    require_same_grid(u[t].grid, m[t].grid, "correspond_flow");
    SphereCurve p = project(u[t]);
    double d = 0;
    for (int j = 0; j < p.size(); ++j) d = std::max(d, (p.samples[j] - m[t].samples[j]).norm());
    r.times.push_back(times[t]);
    r.dev.push_back(d);
  }
  return r;
}

}  // namespace lightcone
