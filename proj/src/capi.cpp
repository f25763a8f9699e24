#include "lightcone/lightcone.h"

#include "lightcone/config.hpp"
#include "lightcone/curves.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/evolution.hpp"
#include "lightcone/io.hpp"
#include "lightcone/verify.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>

using namespace lightcone;
using nlohmann::json;

struct lc_config {
  RunConfig cfg;
  std::string json_buf, hash_buf;
};

struct lc_report {
  std::string json, summary;
};

namespace {

thread_local std::string last_error;

template <class F>
int guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const SchemaError& e) {
    last_error = e.what();
    return LC_SCHEMA;
  } catch (const GeometryError& e) {
    last_error = e.what();
    return LC_GEOMETRY;
  } catch (const PatternViolation& e) {
    last_error = e.what();
    return LC_GEOMETRY;
  } catch (const GuardError& e) {
    std::ostringstream s;
    s << e.what() << " (t = " << e.time() << ")";
    last_error = s.str();
    return LC_GUARD;
  } catch (const CalibrationError& e) {
    last_error = e.what();
    return LC_CALIBRATION;
  } catch (const InvalidArgument& e) {
    last_error = e.what();
    return LC_INVALID_ARGUMENT;
  } catch (const GridMismatch& e) {
    last_error = e.what();
    return LC_INVALID_ARGUMENT;
  } catch (const IoError& e) {
    last_error = e.what();
    return LC_IO;
  } catch (const json::exception& e) {
    last_error = std::string("json: ") + e.what();
    return LC_SCHEMA;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return LC_IO;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LC_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return LC_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw InvalidArgument(std::string(what) + " must not be null");
}

void emit(lc_report** out, const json& j, const std::string& summary) {
  if (!out) return;
  *out = new lc_report{j.dump(2), summary};
}

std::string sidecar_path(const std::string& output) { return output + ".json"; }

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

double sup_diff(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs(); }

std::vector<std::string> split_list(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

json signs_json(const Signs& s) { return json::array({s[0], s[1]}); }

void require_finite(const ConeInvariants& k) {
  const GridFunction* f[3] = {&k.k0, &k.k1, &k.k2};
  for (auto* g : f)
    for (int j = 0; j < g->size(); ++j)
      if (!std::isfinite((*g)[j])) throw GeometryError(GeometryFault::non_finite, j, "non-finite invariant value");
}

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t_%06d.csv", index);
  return buf;
}

// ---- commands ----

int invariants_cone(const RunConfig& cfg, const std::string& input, const std::string& output, lc_report** report) {
  const DiffMethod dm = cfg.method();
  ConeCurve u = io::read_cone_csv(input);
  Tolerances tol;
  tol.group = cfg.tol("group");
  tol.cone = cfg.tol("cone");
  tol.normalization = cfg.tol("normalization");
  tol.pattern = cfg.tol("pattern");
  validate_cone_curve(u, tol, dm);
  auto f = cone_frame(u, dm, tol);
  auto res = normalization_residuals(u, f, dm);
  auto K = maurer_cartan(f, dm, tol.pattern);
  auto k = invariants_from_frame(K, tol.pattern);
  auto calib = resolve_calibration(cfg);
  auto cf = cone_invariants_closed_form(u, ConeFormula::general, dm);
  json dev{{"k0", sup_diff(cf.k0, k.k0)},
           {"k1", sup_diff(cf.k1, k.k1 * (double)calib.sigma_cone[0])},
           {"k2", sup_diff(cf.k2, k.k2 * (double)calib.sigma_cone[1])}};
  io::write_atomic(output, io::cone_invariants_csv(k));
  json side{{"space", "cone"},
            {"input", input},
            {"n", u.size()},
            {"length", u.grid.length()},
            {"columns", {"x", "k0", "k1", "k2"}},
            {"convention", "frame-derived: k0 = -z1, k1 = -w1, k2 = -w2 of K = rho_x rho^-1"},
            {"frame_residuals",
             {{"group", res.group}, {"c0", res.c0}, {"c1", res.c1}, {"c2", res.c2}, {"k0_squared", res.a}}},
            {"projection_defect", K.projection_defect},
            {"pattern_defect", cone_pattern_defect(K)},
            {"closed_form_vs_frame", dev},
            {"sigma_cone", signs_json(calib.sigma_cone)},
            {"config_hash", cfg.hash()}};
  io::write_atomic(sidecar_path(output), side.dump(2) + "\n");
  std::ostringstream s;
  s << "wrote " << output << " (" << u.size() << " nodes); frame group residual " << res.group;
  emit(report, side, s.str());
  return LC_OK;
}

int invariants_sphere(const RunConfig& cfg, const std::string& input, const std::string& output, lc_report** report) {
  const DiffMethod dm = cfg.method();
  SphereCurve m = io::read_sphere_csv(input);
  validate_sphere_curve(m, dm);
  auto f = sphere_frame(m, dm);
  auto res = sphere_normalization_residuals(m, f, dm);
  auto K = maurer_cartan(f, dm, cfg.tol("pattern"));
  auto fr = sphere_invariants_from_frame(K, cfg.tol("pattern"));
  auto calib = resolve_calibration(cfg);
  SphereInvariants out{fr.kappa1 * (double)calib.sigma_sphere[0], fr.kappa2 * (double)calib.sigma_sphere[1]};
  auto cf = sphere_invariants_closed_form(m, dm);
  json dev{{"kappa1", sup_diff(cf.kappa1, out.kappa1)}, {"kappa2", sup_diff(cf.kappa2, out.kappa2)}};
  io::write_atomic(output, io::sphere_invariants_csv(out));
  json side{{"space", "sphere"},
            {"input", input},
            {"n", m.size()},
            {"length", m.grid.length()},
            {"columns", {"x", "kappa1", "kappa2"}},
            {"convention", "sigma_sphere times the -w_i entries of K, which matches the normalized-image oracle"},
            {"frame_residuals",
             {{"group", res.group}, {"c0", res.c0}, {"c1", res.c1}, {"c2", res.c2}, {"a", res.a}}},
            {"projection_defect", K.projection_defect},
            {"pattern_defect", sphere_pattern_defect(K)},
            {"closed_form_vs_frame", dev},
            {"sigma_sphere", signs_json(calib.sigma_sphere)},
            {"config_hash", cfg.hash()}};
  io::write_atomic(sidecar_path(output), side.dump(2) + "\n");
  std::ostringstream s;
  s << "wrote " << output << " (" << m.size() << " nodes); frame group residual " << res.group;
  emit(report, side, s.str());
  return LC_OK;
}

ConeInvariants kdv_initial(const RunConfig& cfg, const char* input, const std::string& space) {
  if (input) {
    if (space == "invariants" || space.empty()) return io::read_cone_invariants_csv(input, true);
    if (space == "cone") return curve_invariants(cone_jets(io::read_cone_csv(input), cfg.method()), resolve_calibration(cfg));
    if (space == "sphere")
      return curve_invariants(lift_arclength_jets(io::read_sphere_csv(input), cfg.method()), resolve_calibration(cfg));
    throw InvalidArgument("flow --kind kdv: unknown space '" + space + "'");
  }
  const auto& ic = cfg.initial;
  PeriodicGrid g(cfg.n_points, cfg.resolved_length());
  if (ic.kind == "soliton") return kdv_soliton(g, ic.beta, ic.center, 0.0);
  if (ic.kind == "constant")
    return {GridFunction::constant(g, 1.0), GridFunction::constant(g, ic.k1), GridFunction::constant(g, ic.k2)};
  SphereCurve m = ic.curve == "perturbed_circle" ? curves::perturbed_circle(cfg.n_points, ic.amplitude)
                                                 : curves::sphere(ic.curve, cfg.n_points);
  return curve_invariants(lift_arclength_jets(m, cfg.method()), resolve_calibration(cfg));
}

int flow_kdv(const RunConfig& cfg, const char* input, const std::string& space, const std::string& dir,
             lc_report** report) {
  double start = now_seconds();
  ConeInvariants k = kdv_initial(cfg, input, space);
  require_finite(k);
  KdvScheme scheme = parse_kdv_scheme(cfg.scheme);
  double dt = cfg.dt > 0 ? cfg.dt : (scheme == KdvScheme::ifrk4 ? 1e-4 : 0.5 * 0.05 * std::pow(k.k1.grid.dx(), 3));
  auto tr = integrate_kdv(k, cfg.t_end, dt, scheme, cfg.outputs);
  std::filesystem::create_directories(dir);
  double mass0 = integrate(k.k1), h0 = hamiltonian_h(k.k1, k.k2);
  double mass_drift = 0, h_drift = 0;
  json files = json::array();
  for (size_t i = 0; i < tr.states.size(); ++i) {
    const auto& s = tr.states[i];
    mass_drift = std::max(mass_drift, std::abs(integrate(s.k1) - mass0));
    h_drift = std::max(h_drift, std::abs(hamiltonian_h(s.k1, s.k2) - h0));
    io::write_atomic((std::filesystem::path(dir) / frame_name((int)i)).string(), io::cone_invariants_csv(s));
    files.push_back({{"t", tr.times[i]}, {"file", frame_name((int)i)}});
  }
  const auto& kf = tr.states.back();
  json sum{{"kind", "kdv"},
           {"scheme", tr.scheme},
           {"n", k.k1.size()},
           {"length", k.k1.grid.length()},
           {"dt", tr.dt},
           {"t_end", cfg.t_end},
           {"outputs", files},
           {"mass_drift", mass_drift},
           {"h_drift", h_drift},
           {"k0_drift", 0.0},
           {"config_hash", cfg.hash()}};
  if (!input && cfg.initial.kind == "soliton") {
    auto exact = kdv_soliton(k.k1.grid, cfg.initial.beta, cfg.initial.center, cfg.t_end);
    sum["shape_error"] = sup_diff(kf.k1, exact.k1);
  }
  if (!input && cfg.initial.kind == "constant") {
    double d = 0;
    for (const auto& s : tr.states) d = std::max({d, sup_diff(s.k1, k.k1), sup_diff(s.k2, k.k2)});
    sum["stationary_deviation"] = d;
  }
  sum["wall_seconds"] = now_seconds() - start;
  io::write_atomic((std::filesystem::path(dir) / "summary.json").string(), sum.dump(2) + "\n");
  std::ostringstream s;
  s << "kdv: " << tr.states.size() << " outputs in " << dir << "; mass drift " << mass_drift << ", h drift " << h_drift;
  if (sum.contains("shape_error")) s << ", shape error " << sum["shape_error"].get<double>();
  emit(report, sum, s.str());
  return LC_OK;
}

int flow_curve(const RunConfig& cfg, const char* input, const std::string& space, const std::string& dir,
               lc_report** report) {
  double start = now_seconds();
  auto calib = resolve_calibration(cfg);
  RealizationOptions o;
  o.t_end = cfg.t_end;
  o.dt = cfg.dt;
  o.method = cfg.method();
  o.kdv_scheme = parse_kdv_scheme(cfg.scheme);
  o.outputs = cfg.outputs;
  o.keep_states = true;
  RealizationReport rep;
  if (input && space == "cone") {
    rep = run_realization_experiment(io::read_cone_csv(input), calib, o);
  } else if (input) {
    if (space != "sphere" && !space.empty()) throw InvalidArgument("flow --kind curve: unknown space '" + space + "'");
    rep = run_realization_experiment(io::read_sphere_csv(input), calib, o);
  } else {
    const auto& ic = cfg.initial;
    if (ic.kind != "curve") throw InvalidArgument("flow --kind curve needs a curve initial condition");
    SphereCurve m = ic.curve == "perturbed_circle" ? curves::perturbed_circle(cfg.n_points, ic.amplitude)
                                                   : curves::sphere(ic.curve, cfg.n_points);
    rep = run_realization_experiment(m, calib, o);
  }
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (size_t i = 0; i < rep.curve_states.size(); ++i) {
    auto p = std::filesystem::path(dir);
    char kname[40];
    std::snprintf(kname, sizeof kname, "k_%06d.csv", (int)i);
    io::write_atomic((p / frame_name((int)i)).string(), io::cone_csv(rep.curve_states[i]));
    io::write_atomic((p / kname).string(), io::cone_invariants_csv(rep.curve_k[i]));
    files.push_back({{"t", rep.times[i]}, {"file", frame_name((int)i)}, {"invariants", kname}});
  }
  json sum = rep.to_json();
  sum["kind"] = "curve";
  sum["outputs"] = files;
  sum["sigma"] = {{"cone", signs_json(calib.sigma_cone)},
                  {"sphere", signs_json(calib.sigma_sphere)},
                  {"corr", signs_json(calib.sigma_corr)}};
  sum["config_hash"] = cfg.hash();
  sum["wall_seconds"] = now_seconds() - start;
  io::write_atomic((std::filesystem::path(dir) / "summary.json").string(), sum.dump(2) + "\n");
  std::ostringstream s;
  s << "curve flow: " << rep.steps << " steps; realization-vs-KdV relative L2 " << rep.kdv_rel_l2
    << ", k0 drift rate " << rep.k0_drift_rate << ", sphere deviation " << rep.sphere_dev;
  emit(report, sum, s.str());
  return LC_OK;
}

Mat4 parse_rho0(const std::string& spec, const RunConfig& cfg) {
  if (spec.empty() || spec == "identity") return Mat4::Identity();
  Mat4 m = io::matrix_from_json(json::parse(io::read_file(spec)));
  double r = group_residual(m);
  if (!(r <= cfg.tol("group") * std::max(1.0, m.cwiseAbs().maxCoeff() * m.cwiseAbs().maxCoeff())))
    throw InvalidArgument("rho0 is not in O(3,1): residual " + std::to_string(r));
  return m;
}

int reconstruct(const RunConfig& cfg, const std::string& input, const std::string& rho0_spec, bool unit,
                const std::string& output, lc_report** report) {
  ConeInvariants k = io::read_cone_invariants_csv(input, unit);
  require_finite(k);
  auto K = maurer_cartan_from_invariants(k);
  FrameOdeOptions opts;
  opts.substeps = cfg.substeps;
  Mat4 rho0;
  if (rho0_spec == "chart") {
    auto probe = solve_frame_ode(K, Mat4::Identity(), opts);
    rho0 = group_inverse(chart_transform(probe.curve));
  } else {
    rho0 = parse_rho0(rho0_spec, cfg);
  }
  auto rec = solve_frame_ode(K, rho0, opts);
  double cone = 0;
  for (const auto& v : rec.curve.samples) cone = std::max(cone, cone_residual(v));
  auto mono = monodromy(rec);
  double margin = chart_margin(rec.curve);
  Mat4 theta = Mat4::Identity();
  if (!(margin > 1e-3)) theta = chart_transform(rec.curve);
  auto back = invariants_from_frame(maurer_cartan_from_jets(apply_lorentz(theta, rec.jets), cfg.tol("pattern")),
                                    cfg.tol("pattern"));
  double rt = std::max({sup_diff(back.k0, k.k0), sup_diff(back.k1, k.k1), sup_diff(back.k2, k.k2)});
  io::write_atomic(output, io::cone_csv(rec.curve));
  json side{{"input", input},
            {"n", k.k0.size()},
            {"rho0", io::matrix_json(rho0)},
            {"cone_residual", cone},
            {"frame_group_residual", rec.group_residual},
            {"chart_margin", margin},
            {"roundtrip_deviation", rt},
            {"roundtrip_chart_transform", theta == Mat4::Identity() ? json(nullptr) : io::matrix_json(theta)},
            {"closure", (mono.matrix - Mat4::Identity()).cwiseAbs().maxCoeff()},
            {"monodromy", mono.to_json()},
            {"config_hash", cfg.hash()}};
  io::write_atomic(sidecar_path(output), side.dump(2) + "\n");
  std::ostringstream s;
  s << "wrote " << output << "; cone residual " << cone << ", monodromy group residual " << mono.group_residual
    << ", round trip " << rt;
  emit(report, side, s.str());
  return LC_OK;
}

std::string sign_char(int s) { return s > 0 ? "+1" : "-1"; }

}  // namespace

extern "C" {

const char* lc_version(void) { return "0.1.0"; }

const char* lc_status_name(int status) {
  switch (status) {
    case LC_OK: return "ok";
    case LC_VERIFY_FAILED: return "verify_failed";
    case LC_SCHEMA: return "schema";
    case LC_GEOMETRY: return "geometry";
    case LC_GUARD: return "guard";
    case LC_CALIBRATION: return "calibration";
    case LC_INVALID_ARGUMENT: return "invalid_argument";
    case LC_IO: return "io";
    case LC_INTERNAL: return "internal";
    default: return "unknown";
  }
}

const char* lc_last_error(void) { return last_error.c_str(); }

int lc_config_new(lc_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lc_config{};
    return LC_OK;
  });
}

int lc_config_load(const char* path, lc_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new lc_config{RunConfig::load(path), {}, {}};
    return LC_OK;
  });
}

int lc_config_from_json(const char* text, lc_config** out) {
  return guarded([&] {
    require(text, "json");
    require(out, "out");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("config is not valid JSON: ") + e.what());
    }
    *out = new lc_config{RunConfig::from_json(j), {}, {}};
    return LC_OK;
  });
}

void lc_config_free(lc_config* cfg) { delete cfg; }

int lc_config_set(lc_config* c, const char* key, const char* value) {
  return guarded([&] {
    require(c, "cfg");
    require(key, "key");
    require(value, "value");
    // Round-trip through the JSON validator so flags obey the same schema as files.
    json j = c->cfg.to_json();
    std::string k = key, v = value;
    auto number = [&]() -> double {
      try {
        size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      } catch (const std::exception&) {
        throw InvalidArgument("--" + k + ": '" + v + "' is not a number");
      }
    };
    auto integer = [&]() -> long long {
      double d = number();
      if (d != std::floor(d)) throw InvalidArgument("--" + k + ": '" + v + "' is not an integer");
      return (long long)d;
    };
    if (k == "n") j["n_points"] = integer();
    else if (k == "length") j["length"] = number();
    else if (k == "dt") j["dt"] = number();
    else if (k == "t_end" || k == "t-end") j["t_end"] = number();
    else if (k == "scheme") j["scheme"] = v;
    else if (k == "diff") j["diff_method"] = v;
    else if (k == "seed") j["seed"] = integer();
    else if (k == "calibration") j["calibration"] = v;
    else if (k == "outputs") j["outputs"] = integer();
    else if (k == "substeps") j["substeps"] = integer();
    else throw InvalidArgument("unknown config key '" + k + "'");
    try {
      c->cfg = RunConfig::from_json(j);
    } catch (const SchemaError& e) {
      throw InvalidArgument(std::string("--") + k + ": " + e.what());
    }
    return LC_OK;
  });
}

int lc_config_set_tolerance(lc_config* c, const char* assignment) {
  return guarded([&] {
    require(c, "cfg");
    require(assignment, "assignment");
    c->cfg.set_tolerance(assignment);
    return LC_OK;
  });
}

const char* lc_config_json(lc_config* c) {
  if (!c) return "";
  c->json_buf = c->cfg.to_json().dump(2);
  return c->json_buf.c_str();
}

const char* lc_config_hash(lc_config* c) {
  if (!c) return "";
  c->hash_buf = c->cfg.hash();
  return c->hash_buf.c_str();
}

int lc_cmd_invariants(const lc_config* c, const char* input, const char* space, const char* output,
                      lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    require(input, "input");
    require(output, "output");
    std::string sp = space ? space : "cone";
    if (sp == "cone") return invariants_cone(c->cfg, input, output, report);
    if (sp == "sphere") return invariants_sphere(c->cfg, input, output, report);
    throw InvalidArgument("space must be cone or sphere, got '" + sp + "'");
  });
}

int lc_cmd_lift(const lc_config* c, const char* input, const char* output, lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    require(input, "input");
    require(output, "output");
    SphereCurve m = io::read_sphere_csv(input);
    validate_sphere_curve(m, c->cfg.method());
    ConeCurve u = lift_arclength(m, c->cfg.method());
    io::write_cone_csv(output, u);
    json j{{"input", input}, {"output", output}, {"n", u.size()}, {"config_hash", c->cfg.hash()}};
    emit(report, j, std::string("wrote ") + output);
    return LC_OK;
  });
}

int lc_cmd_project(const lc_config* c, const char* input, const char* output, lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    require(input, "input");
    require(output, "output");
    ConeCurve u = io::read_cone_csv(input);
    SphereCurve m = project(u);
    io::write_sphere_csv(output, m);
    json j{{"input", input}, {"output", output}, {"n", m.size()}, {"config_hash", c->cfg.hash()}};
    emit(report, j, std::string("wrote ") + output);
    return LC_OK;
  });
}

int lc_cmd_flow(const lc_config* c, const char* kind, const char* input, const char* space, const char* output_dir,
                lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    require(kind, "kind");
    require(output_dir, "output_dir");
    std::string k = kind, sp = space ? space : "";
    if (k == "kdv") return flow_kdv(c->cfg, input, sp, output_dir, report);
    if (k == "curve") return flow_curve(c->cfg, input, sp, output_dir, report);
    throw InvalidArgument("flow kind must be kdv or curve, got '" + k + "'");
  });
}

int lc_cmd_reconstruct(const lc_config* c, const char* invariants, const char* rho0, int assume_unit_speed,
                       const char* output, lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    require(invariants, "invariants");
    require(output, "output");
    return reconstruct(c->cfg, invariants, rho0 ? rho0 : "identity", assume_unit_speed != 0, output, report);
  });
}

int lc_cmd_verify(const lc_config* c, const char* suite, const char* output, lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    VerifyReport rep = run_verify(suite ? suite : "all", c->cfg);
    json j = rep.to_json(c->cfg);
    if (output) io::write_atomic(output, j.dump(2) + "\n");
    std::ostringstream s;
    int failed = 0;
    for (const auto& ch : rep.checks) {
      if (ch.pass) continue;
      ++failed;
      s << "FAIL " << ch.suite << "." << ch.name << ": " << ch.value << " vs " << ch.tolerance;
      if (!ch.detail.empty()) s << " (" << ch.detail << ")";
      s << "\n";
    }
    s << rep.suite << ": " << rep.checks.size() - failed << "/" << rep.checks.size() << " checks passed in "
      << rep.wall_seconds << " s";
    emit(report, j, s.str());
    if (!rep.pass()) {
      last_error = std::to_string(failed) + " check(s) failed";
      return LC_VERIFY_FAILED;
    }
    return LC_OK;
  });
}

int lc_cmd_calibrate(const lc_config* c, const char* curve_list, const char* ns, const char* output,
                     lc_report** report) {
  return guarded([&] {
    require(c, "cfg");
    auto names = curve_list ? split_list(curve_list) : curves::calibration_suite();
    std::vector<int> sizes;
    for (const auto& s : split_list(ns)) {
      try {
        sizes.push_back(std::stoi(s));
      } catch (const std::exception&) {
        throw InvalidArgument("bad resolution '" + s + "'");
      }
    }
    if (sizes.empty()) sizes = {128, 256, 512};
    SignCalibration cal = calibrate(names, sizes, c->cfg.tol("calibration"), c->cfg.method());
    if (output) cal.save(output);
    std::ostringstream s;
    for (int i = 0; i < 2; ++i)
      s << "k" << i + 1 << " = sigma" << i + 1 << " * kappa" << i + 1 << " with sigma" << i + 1 << " = "
        << sign_char(cal.sigma_corr[i]) << " (frame-derived on both sides)\n";
    s << "closed-form cone = (" << sign_char(cal.sigma_cone[0]) << ", " << sign_char(cal.sigma_cone[1])
      << ") * frame; closed-form sphere = (" << sign_char(cal.sigma_sphere[0]) << ", "
      << sign_char(cal.sigma_sphere[1]) << ") * frame\n";
    s << "max deviation " << cal.max_dev << " over " << names.size() << " curves";
    emit(report, cal.to_json(), s.str());
    return LC_OK;
  });
}

const char* lc_report_json(const lc_report* r) { return r ? r->json.c_str() : ""; }
const char* lc_report_summary(const lc_report* r) { return r ? r->summary.c_str() : ""; }
void lc_report_free(lc_report* r) { delete r; }

}  // extern "C"
