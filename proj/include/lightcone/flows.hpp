#pragma once

#include "lightcone/cone.hpp"
#include "lightcone/sphere.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>

namespace lightcone {

struct FlowCoefficients {
  GridFunction r1, r2, r3;
  bool arclength_preserving = false;
};

struct SphereFlowCoefficients {
  GridFunction s1, s2;
};

// (û, u3)_t = [[Aᵀ - û ξᵀ, û], [-u3 ξᵀ, u3]] r, u0_t from tangency to the cone.
Vec4 cone_velocity_at(const Vec4& u, const GroupFactors& f, double r1, double r2, double r3);
std::vector<Vec4> assemble_cone_flow(const ConeCurve& c, const ConeFrameField& f, const FlowCoefficients& r);

Vec2 sphere_velocity_at(const Vec2& dm, double s1, double s2);
std::vector<Vec2> assemble_sphere_flow(const SphereCurve& c, const SphereFlowCoefficients& s,
                                       DiffMethod m = DiffMethod::spectral);

GridFunction arclength_r3(const GridFunction& r1, const GridFunction& k0, DiffMethod m = DiffMethod::spectral);

// Uses r3 = -r1'/k0 and tags the result.
FlowCoefficients arclength_flow(const GridFunction& r1, const GridFunction& r2, const GridFunction& k0,
                                DiffMethod m = DiffMethod::spectral);

struct InvariantRates {
  GridFunction k0, k1, k2;
};

InvariantRates induced_invariant_evolution(const ConeInvariants& k, const FlowCoefficients& r,
                                           DiffMethod m = DiffMethod::spectral);

using FieldPair = std::pair<GridFunction, GridFunction>;
using FieldTriple = std::array<GridFunction, 3>;

struct PoissonTensor {
  std::string name;
  OperatorMatrix ops;
};

PoissonTensor tensor_P(const GridFunction& k1, const GridFunction& k2);
PoissonTensor tensor_P_general(const ConeInvariants& k);
PoissonTensor tensor_Q0(const GridFunction& k0);
PoissonTensor tensor_Q0_restricted(const PeriodicGrid& g);  // diag(-D, D)

FieldPair apply_P(const ConeInvariants& k, const FieldPair& rr, DiffMethod m = DiffMethod::spectral);
FieldTriple apply_P_general(const ConeInvariants& k, const FieldTriple& hh, DiffMethod m = DiffMethod::spectral);
FieldTriple apply_Q0(const GridFunction& k0, const FieldTriple& hh, DiffMethod m = DiffMethod::spectral);

FieldPair kdv_rhs(const GridFunction& k1, const GridFunction& k2, DiffMethod m = DiffMethod::spectral);

double hamiltonian_h(const GridFunction& k1, const GridFunction& k2);
FieldPair gradient_h(const GridFunction& k1, const GridFunction& k2);

// Jacobi identity of the bracket {F,G} = ∫ δF·Q δG for Q = diag(-D, D), on random cubic local
// functionals; variational gradients of brackets are taken by an exact-for-quartics stencil.
double q0_jacobi_residual(const PeriodicGrid& g, int trials, std::uint64_t seed);

}  // namespace lightcone
