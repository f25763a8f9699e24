#pragma once

#include "lightcone/config.hpp"
#include "lightcone/correspondence.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace lightcone {

enum class Comparator { le, gt, info };  // value <= tol, value > tol, reported only

struct Check {
  std::string suite;
  std::string name;
  double value = 0;
  double tolerance = 0;
  Comparator comparator = Comparator::le;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::string suite;
  std::vector<Check> checks;
  double wall_seconds = 0;

  bool pass() const;
  std::vector<std::string> failures() const;
  nlohmann::json to_json(const RunConfig& cfg) const;
};

std::vector<std::string> verify_suites();  // all, frames, correspondence, realization, operators

// Loads cfg.calibration when set, otherwise calibrates on the built-in suite at N = 128, 256, 512.
SignCalibration resolve_calibration(const RunConfig& cfg);

VerifyReport run_verify(const std::string& suite, const RunConfig& cfg);

}  // namespace lightcone
