#pragma once
// Temperature step: explicit (upwind or centered) convection, implicit
// diffusion with the conductivity frozen at theta^n. The frozen-coefficient
// system is an M-matrix, so upwind convection under CFL preserves the
// discrete maximum principle.

#include "nschb/coefficients.hpp"
#include "nschb/fields.hpp"
#include "nschb/operators.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

// (theta^{n+1} - theta^n)/dt + div(u^n theta^n) = div(kappa(theta^n) grad theta^{n+1}),
// homogeneous Dirichlet walls. Optional additive source (evaluated by caller).
ScalarField theta_step(const ScalarField& theta_n, const MACVectorField& u_n,
                       const CoefficientModel& m, double dt, ConvectionScheme scheme,
                       const SolverConfig& cfg, const ScalarField* source = nullptr);

// Kirchhoff transform Theta(x) = int_0^theta kappa(s) ds by adaptive Simpson
// quadrature; strictly monotone in theta since kappa > 0.
ScalarField kirchhoff_transform(const ScalarField& theta, const CoefficientModel& m);

}  // namespace nschb
