#pragma once

#include "lightcone/sphere.hpp"

#include <nlohmann/json_fwd.hpp>

#include <array>
#include <string>
#include <vector>

namespace lightcone {

SphereCurve project(const ConeCurve& c);
ConeCurve lift_standard(const SphereCurve& c);
// u = m̃ / |m'|, so that k0 ≡ 1.
ConeCurve lift_arclength(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);
// Jets of the arc-length lift by the chain rule from the jets of m (up to m''''), so only m
// itself is differentiated on the grid.
ConeJets lift_arclength_jets(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);

using Signs = std::array<int, 2>;

struct SignCalibration {
  Signs sigma_cone{1, 1};    // closed-form cone (k1,k2) = σ · frame-derived
  Signs sigma_sphere{1, 1};  // closed-form sphere (κ1,κ2) = σ · frame-derived
  Signs sigma_corr{1, 1};    // frame-derived cone k_i(Λm) = σ · frame-derived sphere κ_i(m)
  std::vector<std::string> curves;
  std::vector<int> N;
  double max_dev = 0;

  nlohmann::json to_json() const;
  static SignCalibration from_json(const nlohmann::json& j);
  static SignCalibration load(const std::string& path);
  void save(const std::string& path) const;
  bool same_signs(const SignCalibration& o) const;
};

struct LabeledCurve {
  std::string name;
  SphereCurve curve;
};

// Per-relation deviation for one curve at one resolution.
struct CalibrationSample {
  std::string curve;
  int n = 0;
  std::array<double, 2> cone_plus{}, cone_minus{};
  std::array<double, 2> sphere_plus{}, sphere_minus{};
  std::array<double, 2> corr_plus{}, corr_minus{};
};

CalibrationSample measure_signs(const LabeledCurve& c, DiffMethod m = DiffMethod::spectral);

// Throws CalibrationError(insufficient) for fewer than 3 distinct curves and
// CalibrationError(inconsistent) when no single sign vector fits every curve within tol.
SignCalibration calibrate(const std::vector<LabeledCurve>& curves, double tol = 1e-4,
                          DiffMethod m = DiffMethod::spectral, std::vector<CalibrationSample>* samples = nullptr);
// Builds each named test curve at every N and calibrates on the union.
SignCalibration calibrate(const std::vector<std::string>& names, const std::vector<int>& ns, double tol = 1e-4,
                          DiffMethod m = DiffMethod::spectral, std::vector<CalibrationSample>* samples = nullptr);

struct MatchReport {
  std::array<double, 2> signed_dev{};  // max |k_i - σ_i κ_i|
  std::array<double, 2> abs_dev{};     // max ||k_i| - |κ_i||
  double k0_dev = 0;                   // max |k0(Λm) - 1|
  double max() const;
};

MatchReport match_invariants(const SphereCurve& m, const SignCalibration& calib, DiffMethod dm = DiffMethod::spectral,
                             double tol_pattern = 1e-7);

struct FlowCorrespondenceReport {
  std::vector<double> times;
  std::vector<double> dev;  // max_j |Π u_j - m_j| per time
  double max() const;
};

FlowCorrespondenceReport correspond_flow(const std::vector<double>& times, const std::vector<ConeCurve>& u,
                                         const std::vector<SphereCurve>& m);

}  // namespace lightcone
