#include "lightcone/lightcone.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Options {
  std::string config, input, output, space, suite = "all", kind = "kdv", rho0 = "identity", curves, ns;
  std::optional<std::string> n, length, dt, t_end, scheme, diff, seed, calibration, outputs, substeps;
  std::vector<std::string> tol;
  bool unit_speed = false, quiet = false;
};

int fail(int status, const char* context) {
  std::fprintf(stderr, "error [%s] %s: %s\n", lc_status_name(status), context, lc_last_error());
  return status;
}

int build_config(const Options& o, lc_config** cfg) {
  int st = o.config.empty() ? lc_config_new(cfg) : lc_config_load(o.config.c_str(), cfg);
  if (st) return fail(st, "config");
  const std::pair<const char*, const std::optional<std::string>*> keys[] = {
      {"n", &o.n},         {"length", &o.length},           {"dt", &o.dt},         {"t_end", &o.t_end},
      {"scheme", &o.scheme}, {"diff", &o.diff},             {"seed", &o.seed},     {"calibration", &o.calibration},
      {"outputs", &o.outputs}, {"substeps", &o.substeps}};
  for (const auto& [key, value] : keys)
    if (value->has_value() && (st = lc_config_set(*cfg, key, (*value)->c_str()))) return fail(st, key);
  for (const auto& t : o.tol)
    if ((st = lc_config_set_tolerance(*cfg, t.c_str()))) return fail(st, "--tol");
  return 0;
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Light-cone and Moebius-sphere curve invariants, flows and reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(lc_version()));

  app.add_option("--config", o.config, "RunConfig JSON file");
  app.add_option("--input", o.input, "input CSV");
  app.add_option("--output", o.output, "output file or directory");
  app.add_option("--space", o.space, "cone | sphere (| invariants for flow input)");
  app.add_option("--n", o.n, "grid points");
  app.add_option("--length", o.length, "period length");
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--t-end", o.t_end, "final time");
  app.add_option("--scheme", o.scheme, "ifrk4 | rk4");
  app.add_option("--diff", o.diff, "spectral | fd4");
  app.add_option("--seed", o.seed, "RNG seed");
  app.add_option("--calibration", o.calibration, "SignCalibration JSON");
  app.add_option("--outputs", o.outputs, "trajectory frames");
  app.add_option("--substeps", o.substeps, "frame ODE substeps per grid cell");
  app.add_option("--tol", o.tol, "tolerance override KEY=VAL (repeatable)")->take_all();
  app.add_flag("--quiet", o.quiet, "suppress the summary on stdout");

  auto* inv = app.add_subcommand("invariants", "differential invariants of a cone or sphere curve");
  auto* lift = app.add_subcommand("lift", "arc-length lift of a sphere curve to the cone");
  auto* proj = app.add_subcommand("project", "projection of a cone curve to the sphere");
  auto* flow = app.add_subcommand("flow", "run the coupled KdV or the geometric curve flow");
  flow->add_option("--kind", o.kind, "kdv | curve")->check(CLI::IsMember({"kdv", "curve"}));
  auto* rec = app.add_subcommand("reconstruct", "solve the frame ODE from invariants");
  rec->add_option("--rho0", o.rho0, "identity | chart | path to a JSON 4x4 matrix");
  rec->add_flag("--assume-unit-speed", o.unit_speed, "accept an invariants CSV without a k0 column");
  auto* ver = app.add_subcommand("verify", "run property suites");
  ver->add_option("--suite", o.suite, "all | frames | correspondence | realization | operators");
  auto* cal = app.add_subcommand("calibrate", "fit the global sign conventions");
  cal->add_option("--curves", o.curves, "comma-separated built-in curve names");
  cal->add_option("--ns", o.ns, "comma-separated resolutions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : LC_INVALID_ARGUMENT;
  }

  lc_config* cfg = nullptr;
  if (int st = build_config(o, &cfg)) {
    lc_config_free(cfg);
    return st;
  }
  lc_report* report = nullptr;
  int st = LC_OK;
  const char* what = "";
  auto need = [&](const std::string& v, const char* flag) {
    if (v.empty()) {
      std::fprintf(stderr, "error [invalid_argument] %s is required\n", flag);
      return false;
    }
    return true;
  };
  if (*inv) {
    what = "invariants";
    if (!need(o.input, "--input") || !need(o.output, "--output")) st = LC_INVALID_ARGUMENT;
    else st = lc_cmd_invariants(cfg, o.input.c_str(), o.space.empty() ? "cone" : o.space.c_str(), o.output.c_str(), &report);
  } else if (*lift) {
    what = "lift";
    if (!need(o.input, "--input") || !need(o.output, "--output")) st = LC_INVALID_ARGUMENT;
    else st = lc_cmd_lift(cfg, o.input.c_str(), o.output.c_str(), &report);
  } else if (*proj) {
    what = "project";
    if (!need(o.input, "--input") || !need(o.output, "--output")) st = LC_INVALID_ARGUMENT;
    else st = lc_cmd_project(cfg, o.input.c_str(), o.output.c_str(), &report);
  } else if (*flow) {
    what = "flow";
    if (!need(o.output, "--output")) st = LC_INVALID_ARGUMENT;
    else st = lc_cmd_flow(cfg, o.kind.c_str(), opt(o.input), opt(o.space), o.output.c_str(), &report);
  } else if (*rec) {
    what = "reconstruct";
    if (!need(o.input, "--input") || !need(o.output, "--output")) st = LC_INVALID_ARGUMENT;
    else st = lc_cmd_reconstruct(cfg, o.input.c_str(), o.rho0.c_str(), o.unit_speed, o.output.c_str(), &report);
  } else if (*ver) {
    what = "verify";
    st = lc_cmd_verify(cfg, o.suite.c_str(), opt(o.output), &report);
  } else if (*cal) {
    what = "calibrate";
    st = lc_cmd_calibrate(cfg, opt(o.curves), opt(o.ns), opt(o.output), &report);
    if (st == LC_OK && o.output.empty()) std::cout << lc_report_json(report) << "\n";
  }

  if (report && !o.quiet) std::cout << lc_report_summary(report) << "\n";
  if (st != LC_OK && st != LC_INVALID_ARGUMENT) fail(st, what);
  lc_report_free(report);
  lc_config_free(cfg);
  return st;
}
