#pragma once

#include "lightcone/cone.hpp"

namespace lightcone {

struct SphereCurve {
  PeriodicGrid grid;
  std::vector<Vec2> samples;

  SphereCurve(const PeriodicGrid& g, std::vector<Vec2> s);
  int size() const { return grid.size(); }
  std::vector<double> component(int c) const;
};

struct SphereJets {
  PeriodicGrid grid;
  std::array<std::vector<Vec2>, 4> d;  // m, m', m'', m'''
};

SphereJets sphere_jets(const SphereCurve& c, DiffMethod m = DiffMethod::spectral, Warnings* warnings = nullptr);

void validate_sphere_curve(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);

// Conformal action through the factorization of Θ. Throws ChartBreakdown at the first node
// sent to infinity.
SphereCurve moebius_apply(const Mat4& theta, const SphereCurve& c);
Vec2 moebius_apply(const GroupFactors& f, const Vec2& m, long node = -1);
// Same map computed as Π(Θ m̃), for cross-checks.
SphereCurve moebius_apply_projective(const Mat4& theta, const SphereCurve& c);

Mat4 sphere_frame_at(const Vec2& m, const Vec2& dm, const Vec2& ddm, long node, GroupFactors* factors = nullptr);
FrameField sphere_frame(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);
FrameField sphere_frame_from_jets(const SphereJets& j);

// Jet (n, n', n'', n''') at x0 of x -> Π(ρ m̃(x)), from the jet of m at x0.
std::array<Vec2, 4> image_jet(const Mat4& rho, const std::array<Vec2, 4>& mjet, long node = -1);

struct NormalizedImage {
  SphereCurve image;          // ρ(x0)·m(x_j); masked nodes hold NaN-free placeholders (zeros)
  std::vector<bool> in_chart;
  int base = 0;
  std::array<Vec2, 4> jet;    // value, first, second, third derivative at the base node
};

NormalizedImage normalized_image(const SphereCurve& c, int node, DiffMethod m = DiffMethod::spectral);

NormalizationReport sphere_normalization_residuals(const SphereCurve& c, const FrameField& f,
                                                   DiffMethod m = DiffMethod::spectral);

struct SphereInvariants {
  GridFunction kappa1, kappa2;
};

SphereInvariants sphere_invariants_closed_form(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);
SphereInvariants sphere_invariants_closed_form(const SphereJets& j);
// Third derivative of the normalized image at every node.
SphereInvariants sphere_invariants_from_image(const SphereCurve& c, DiffMethod m = DiffMethod::spectral);
// Reads κ_i = -w_i of K = ρ_x ρ⁻¹, the same entry convention as the cone.
SphereInvariants sphere_invariants_from_frame(const MaurerCartanField& k, double tol_pattern = 1e-7);
// K along the jet (m', m'', m'''), without differentiating the frame across the grid.
MaurerCartanField sphere_maurer_cartan_from_jets(const SphereJets& j, double tol_pattern = 1e-7);
SphereInvariants sphere_invariants_from_frame(const SphereCurve& c, DiffMethod m = DiffMethod::spectral,
                                              double tol_pattern = 1e-7, MaurerCartanField* k_out = nullptr);

}  // namespace lightcone
