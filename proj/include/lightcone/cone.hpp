#pragma once

#include "lightcone/lorentz.hpp"
#include "lightcone/periodic.hpp"
#include "lightcone/tolerances.hpp"

#include <array>
#include <vector>

namespace lightcone {

struct ConeCurve {
  PeriodicGrid grid;
  std::vector<Vec4> samples;

  ConeCurve(const PeriodicGrid& g, std::vector<Vec4> s);
  int size() const { return grid.size(); }
  std::vector<double> component(int c) const;
};

// Throws GeometryError for off-cone samples, u3 = 0, or radial/lower-cone velocity.
void validate_cone_curve(const ConeCurve& c, const Tolerances& tol = {}, DiffMethod m = DiffMethod::spectral);

ConeCurve apply_lorentz(const Mat4& theta, const ConeCurve& c);

struct ConeJets {
  PeriodicGrid grid;
  std::array<std::vector<Vec4>, 4> d;  // u, u', u'', u'''
};

ConeJets cone_jets(const ConeCurve& c, DiffMethod m = DiffMethod::spectral, Warnings* warnings = nullptr);

// Moving frame per node. For the sphere, factors hold (β, B, w, η) in the (alpha, A, v, xi) slots.
struct FrameField {
  PeriodicGrid grid;
  std::vector<Mat4> rho;
  std::vector<GroupFactors> factors;
  // Cone only: the closed-form ξ₂ magnitude det(u,u',u'')/(u3 k0²), kept as a cross-check.
  std::vector<double> xi2_formula;
};

using ConeFrameField = FrameField;

ConeFrameField cone_frame(const ConeCurve& c, DiffMethod m = DiffMethod::spectral, const Tolerances& tol = {});
ConeFrameField cone_frame_from_jets(const ConeJets& j);

// Per-node frame from (u, u', u''). Throws GeometryError tagged with node.
Mat4 cone_frame_at(const Vec4& u, const Vec4& du, const Vec4& ddu, long node, GroupFactors* factors = nullptr,
                   double* xi2_formula = nullptr);

struct NormalizationReport {
  double c0 = 0;     // max |ρu - e4|
  double c1 = 0;     // max |ρu' - k0 e1|
  double c2 = 0;     // max |(ρu'')_2|
  double a = 0;      // max |(ρu'')_0 - k0²|
  double group = 0;  // max |ρᵀJρ - J|
  double max() const;
};

NormalizationReport normalization_residuals(const ConeCurve& c, const ConeFrameField& f,
                                            DiffMethod m = DiffMethod::spectral);
NormalizationReport normalization_residuals(const ConeJets& j, const ConeFrameField& f);

struct ConeInvariants {
  GridFunction k0, k1, k2;
};

// arclength: k1 over 2|u'|⁴ and k2 = D3'''/(u3 k0²) + 3<u',u''> D3''/(u3 k0³), exact only when k0 ≡ 1.
// general:   k1 over 2 k0⁵ and k2 = D3'''/(u3 k0³) - 3<u',u''> D3''/(u3 k0⁵), valid for any parameter.
enum class ConeFormula { arclength, general };

ConeInvariants cone_invariants_closed_form(const ConeCurve& c, ConeFormula f = ConeFormula::arclength,
                                           DiffMethod m = DiffMethod::spectral);
ConeInvariants cone_invariants_closed_form(const ConeJets& j, ConeFormula f = ConeFormula::arclength);

struct MaurerCartanField {
  PeriodicGrid grid;
  std::vector<LorentzAlgebraElement> K;
  double projection_defect = 0;  // max distance of ρ_x ρ⁻¹ from the algebra
  double scale() const;          // max(1, max_j |K_j|)
};

MaurerCartanField maurer_cartan(const FrameField& f, DiffMethod m = DiffMethod::spectral,
                                double tol_pattern = 1e-7);

// K = rho_x rho^-1 with rho_x taken as the derivative of the frame map along the jet (u', u'', u'''),
// so no differentiation across the grid is needed. Works for open (non-closing) curves.
MaurerCartanField maurer_cartan_from_jets(const ConeJets& j, double tol_pattern = 1e-7);

// Off-pattern size relative to scale(): a, b, z₂ for the cone; additionally z₁ + 1 for the sphere.
double cone_pattern_defect(const MaurerCartanField& k);
double sphere_pattern_defect(const MaurerCartanField& k);

// Reads k0 = -z₁, k1 = -w₁, k2 = -w₂.
ConeInvariants invariants_from_frame(const MaurerCartanField& k, double tol_pattern = 1e-7);

// Builds the Maurer-Cartan field with the pattern above from invariant data.
MaurerCartanField maurer_cartan_from_invariants(const ConeInvariants& k);

ConeCurve reparametrize_arclength(const ConeCurve& c, DiffMethod m = DiffMethod::spectral);

}  // namespace lightcone
