#pragma once
// Steady Stokes solves on the MAC grid (Uzawa / Schur-complement CG with exact
// inner inverses) and the discrete Stokes eigenmode basis used by the
// velocity-Galerkin mode.

#include <vector>

#include "nschb/fields.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

struct StokesSolution {
    MACVectorField u;   // divergence-free, no-slip
    ScalarField p;      // mean zero
    int iters = 0;
    double rel_residual = 0.0;
};

// -Lap u + grad p = g, div u = 0, u no-slip, mean(p) = 0.
StokesSolution solve_stokes(const MACVectorField& g, const SolverConfig& cfg);

// Componentwise vector Laplacian with no-slip closure.
MACVectorField apply_vector_laplacian(const MACVectorField& u);

// Exact componentwise inverse of -Lap (no-slip closure) via fast
// diagonalization; boundary faces of the result are zero.
MACVectorField vector_laplacian_inverse(const MACVectorField& rhs);

// Gradient bilinear form (grad u : grad v) with cell/node quadrature.
double grad_inner(const MACVectorField& u, const MACVectorField& v);

struct StokesModes {
    std::vector<MACVectorField> modes;   // L2-orthonormal, divergence-free, no-slip
    std::vector<double> lambdas;         // ascending, positive
};

// First m discrete Stokes eigenpairs by inverse subspace iteration with
// Rayleigh-Ritz over a doubled subspace; iterates until the relative
// eigen-residual of each requested mode is below mode_tol. Deterministic
// (fixed seed). max_modes guards cost.
StokesModes stokes_eigenmodes(const Grid& g, int m, const SolverConfig& cfg, int max_modes = 64,
                              double mode_tol = 1e-7);

}  // namespace nschb
