#pragma once

#include "lightcone/correspondence.hpp"
#include "lightcone/flows.hpp"

#include <nlohmann/json_fwd.hpp>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace lightcone {

// ---- coupled KdV ----

enum class KdvScheme { ifrk4, rk4 };
KdvScheme parse_kdv_scheme(const std::string& s);
const char* to_string(KdvScheme s);

struct KdvOptions {
  bool nonlinear = true;        // test hook: false leaves only the Airy terms
  double stability_c = 0.05;    // rk4 guard dt <= C dx³
  double blowup_factor = 1e6;   // |k|_inf growth that counts as blow-up
};

// Fourier-space stepper with cached exponentials for one dt.
class KdvStepper {
public:
  KdvStepper(const PeriodicGrid& g, double dt, KdvScheme scheme, const KdvOptions& opts = {});
  // Advances (k1, k2) in place; t is only used for error messages.
  void step(std::vector<double>& k1, std::vector<double>& k2, double t = 0) const;
  double dt() const { return dt_; }

private:
  using Spec = std::vector<std::complex<double>>;
  void rhs_nonlinear(const Spec& a, const Spec& b, Spec& na, Spec& nb) const;
  void rhs_full(const Spec& a, const Spec& b, Spec& na, Spec& nb) const;

  PeriodicGrid grid_;
  double dt_;
  KdvScheme scheme_;
  KdvOptions opts_;
  std::vector<double> wave_;  // angular wavenumbers, Nyquist zeroed
  Spec e1_half_, e1_full_, e2_half_, e2_full_;
};

// k1 = -4β² sech²(β(x - cL - 4β²t)) periodized over three neighbours each side, k0 = 1, k2 = 0.
ConeInvariants kdv_soliton(const PeriodicGrid& g, double beta, double center, double t);

ConeInvariants step_kdv(const ConeInvariants& k, double dt, KdvScheme scheme, const KdvOptions& opts = {});

template <class State>
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::string scheme;
  double dt = 0;
  int n = 0;
};

// Integrates to t_end with the step count rounded up so that dt divides t_end; states
// every output_every steps (and the final one).
Trajectory<ConeInvariants> integrate_kdv(const ConeInvariants& k0, double t_end, double dt, KdvScheme scheme,
                                         int outputs = 10, const KdvOptions& opts = {});

// ---- curve flows ----

struct CurveState {
  const ConeCurve& curve;
  const ConeJets& jets;
  const ConeFrameField& frames;
  const ConeInvariants& k;  // frame convention, valid for any k0
  DiffMethod method;
};

using CurveFlowRule = std::function<FlowCoefficients(const CurveState&)>;

// r = (k1, k2, -k1'/k0) with k in the frame-derived convention.
CurveFlowRule kdv_rule(const SignCalibration& calib);
// r3 = +k1' instead, which does not preserve k0.
CurveFlowRule kdv_rule_literal(const SignCalibration& calib);
CurveFlowRule constant_rule(double r1, double r2, double r3);

struct CurveFlowOptions {
  DiffMethod method = DiffMethod::spectral;
  double stability_c = 0.05;
  bool guard = true;
  bool reproject = true;
  double reproject_threshold = 1e-10;
  // Truncates velocities to |k| <= N/3; without it the variable-coefficient third-order
  // terms alias near Nyquist into modes with real growth rates (up to ~ (N/2)³ for the sphere).
  bool dealias = true;
};

struct CurveStepInfo {
  bool reprojected = false;
  double cone_residual = 0;  // before any re-projection
};

// Invariants of a curve in the frame convention without differentiating the frame.
ConeInvariants curve_invariants(const ConeJets& j, const SignCalibration& calib);

ConeCurve step_curve_flow(const ConeCurve& c, const CurveFlowRule& rule, double dt,
                          const SignCalibration& calib = {}, const CurveFlowOptions& opts = {},
                          CurveStepInfo* info = nullptr);

using SphereFlowRule = std::function<SphereFlowCoefficients(const SphereCurve&, const SphereJets&)>;

// s = σ_corr κ with κ frame-derived (the closed form times σ_sphere).
SphereFlowRule sphere_kdv_rule(const SignCalibration& calib);
SphereFlowRule sphere_constant_rule(double s1, double s2);

SphereCurve step_sphere_flow(const SphereCurve& c, const SphereFlowRule& rule, double dt,
                             const CurveFlowOptions& opts = {});

struct CurveFlowSummary {
  int steps = 0;
  int reprojections = 0;
  double max_cone_residual = 0;
};

Trajectory<ConeCurve> integrate_curve_flow(const ConeCurve& c, const CurveFlowRule& rule, double t_end, double dt,
                                           int outputs, const SignCalibration& calib = {},
                                           const CurveFlowOptions& opts = {}, CurveFlowSummary* summary = nullptr);
Trajectory<SphereCurve> integrate_sphere_flow(const SphereCurve& c, const SphereFlowRule& rule, double t_end,
                                              double dt, int outputs, const CurveFlowOptions& opts = {});

// ---- frame ODE and monodromy ----

enum class FrameConvention { k_left, k_right };  // ρ_x = Kρ  or  ρ_x = ρK

struct FrameOdeOptions {
  int substeps = 4;
  FrameConvention convention = FrameConvention::k_left;
};

struct FrameOdeResult {
  std::vector<Mat4> rho;  // at the N nodes
  Mat4 rho_end;           // ρ(L)
  ConeCurve curve;        // u = ρ⁻¹ e4
  ConeJets jets;          // exact jets of u from K and its derivatives
  double group_residual = 0;
};

FrameOdeResult solve_frame_ode(const MaurerCartanField& k, const Mat4& rho0, const FrameOdeOptions& opts = {});

struct Monodromy {
  Mat4 matrix;
  std::array<std::complex<double>, 4> eigenvalues;
  double group_residual = 0;
  double conjugation_defect = 0;  // max_i min_j |conj λ_i - λ_j|
  double reciprocal_defect = 0;   // max_i min_j |1/λ_i - λ_j|

  nlohmann::json to_json() const;
};

Monodromy monodromy(const Mat4& rho_start, const Mat4& rho_end);
Monodromy monodromy(const FrameOdeResult& r);
double eigenvalue_drift(const Monodromy& a, const Monodromy& b);

// min_j u3 / |u_j|: positive iff every sample lies in the chart u3 > 0.
double chart_margin(const ConeCurve& u);
// Deterministic search over seeded Lorentz transforms (and the identity) for the Θ that
// maximizes chart_margin(Θu). Invariants are unchanged, so round trips may use Θu.
Mat4 chart_transform(const ConeCurve& u, int candidates = 64);
ConeJets apply_lorentz(const Mat4& theta, const ConeJets& j);

struct IsospectralReport {
  Monodromy start, end;
  double drift = 0;
};

// Monodromy of the frame ODE for k at t = 0 and after direct KdV integration to t_end.
IsospectralReport monodromy_along_kdv(const ConeInvariants& k, double t_end, double dt,
                                      KdvScheme scheme = KdvScheme::ifrk4, const FrameOdeOptions& opts = {});

// Θ = ρ_true(0)⁻¹ ρ_rec(0) sends the reconstruction onto the original; returns max_j |u_j - Θ u_rec,j|.
double congruence_residual(const ConeCurve& original, const Mat4& rho_true0, const FrameOdeResult& rec);

// ---- realization experiment ----

struct RealizationOptions {
  double t_end = 0.05;
  double dt = 0;            // curve and sphere flows; 0 picks stability_c·dx³/2
  double dt_kdv = 1e-4;
  int outputs = 5;
  DiffMethod method = DiffMethod::spectral;
  KdvScheme kdv_scheme = KdvScheme::ifrk4;
  bool run_literal = true;
  double literal_t_end = 0.01;
  bool run_sphere = true;
  bool run_monodromy = true;
  bool keep_states = false;
  CurveFlowOptions flow;
};

struct RealizationReport {
  int n = 0;
  double t_end = 0, dt = 0, dt_kdv = 0;
  int steps = 0, reprojections = 0;
  double k0_drift = 0;                 // max_x |k0(t) - k0(0)| over outputs
  double k0_drift_rate = 0;            // k0_drift / t_end
  double kdv_rel_l2 = 0;               // at t_end
  std::vector<double> kdv_rel_l2_series;
  double invariant_spread = 0;         // max over outputs of max_x |k(t) - k(0)|
  double sphere_dev = 0;               // max over outputs of |Π u - m|
  double literal_k0_drift_rate = -1;   // per unit time, r3 = +k1'
  double monodromy_drift = -1;
  double h_drift = 0, mass_drift = 0;  // along the direct KdV run
  double max_cone_residual = 0;
  std::vector<double> times;
  // Filled only with keep_states, one entry per output time.
  std::vector<ConeCurve> curve_states;
  std::vector<ConeInvariants> curve_k, kdv_states;

  nlohmann::json to_json() const;
};

RealizationReport run_realization_experiment(const SphereCurve& initial, const SignCalibration& calib,
                                             const RealizationOptions& opts = {});
RealizationReport run_realization_experiment(const ConeCurve& initial, const SignCalibration& calib,
                                             const RealizationOptions& opts = {});

}  // namespace lightcone
