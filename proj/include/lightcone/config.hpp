#pragma once

#include "lightcone/periodic.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace lightcone {

struct InitialCondition {
  std::string kind = "curve";  // curve | soliton | constant
  std::string curve = "perturbed_circle";
  double amplitude = 1e-2;     // perturbed_circle only
  double beta = 1.0;           // soliton
  double center = 0.5;         // soliton, fraction of the period
  double k1 = 0.0, k2 = 0.0;   // constant
};

struct RunConfig {
  int n_points = 256;
  double length = 0;           // 0 means 2π for curves and 40 for solitons
  std::string diff_method = "spectral";
  std::string scheme = "ifrk4";
  double dt = 0;               // 0 picks a stable default per integrator
  double t_end = 0.05;
  std::map<std::string, double> tolerances;
  std::uint64_t seed = 0;
  std::string calibration;     // path; empty means calibrate on the fly where needed
  int outputs = 5;
  int substeps = 4;
  int equivariance_samples = 100;
  InitialCondition initial;

  static std::map<std::string, double> default_tolerances();
  double tol(const std::string& key) const;  // throws InvalidArgument for unknown keys
  DiffMethod method() const { return parse_diff_method(diff_method); }
  double resolved_length() const;

  // Validates against the schema in schemas/run_config.schema.json; unknown keys are rejected.
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;
  std::string hash() const;  // FNV-1a of the canonical JSON, hex

  // "KEY=VAL"; KEY must be a known tolerance.
  void set_tolerance(const std::string& assignment);
};

// Worker count from TOOLKIT_THREADS (default: hardware concurrency, at least 1).
int thread_count();
// Runs body(i) for i in [0, n) on up to thread_count() threads; rethrows the first exception.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace lightcone
