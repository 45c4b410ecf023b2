#pragma once
// Cell-centered elliptic solves. Method::ConjugateGradient runs PCG with the
// exact constant-coefficient fast-diagonalization preconditioner;
// Method::Multigrid iterates geometric V-cycles. Variable-coefficient
// problems always run PCG, preconditioned per the chosen method.

#include "nschb/fields.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

// A0^{-1}: -Lap u = g with Neumann bc and mean(u) = 0. Requires the discrete
// compatibility |mean(g)| <= 1e-10 * rms(g); throws CompatibilityError
// otherwise, SolverError on non-convergence.
ScalarField solve_neumann_poisson(const ScalarField& g, const SolverConfig& cfg);

// (alpha - beta*Lap) u = rhs, bc taken from rhs.
ScalarField solve_helmholtz(const ScalarField& rhs, double alpha, double beta,
                            const SolverConfig& cfg);

// (alpha - div(kappa grad)) u = rhs, bc from rhs; kappa > 0 cellwise.
ScalarField solve_var_diffusion(const ScalarField& rhs, double alpha, const ScalarField& kappa,
                                const SolverConfig& cfg);

// Removes the discrete gradient part: u <- u - grad(psi), Lap psi = div u
// (Neumann, direct solve, exact to rounding). If p_out is non-null it
// receives psi * p_scale (mean zero).
void leray_project(MACVectorField& u, ScalarField* p_out = nullptr, double p_scale = 1.0);

// Applies (alpha - beta*Lap) with the field's ghost convention.
void apply_helmholtz(const ScalarField& x, double alpha, double beta, ScalarField& y);

}  // namespace nschb
