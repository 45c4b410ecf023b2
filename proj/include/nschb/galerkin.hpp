#pragma once
// Semi-Galerkin velocity mode: the velocity evolves in the span of the first
// m discrete Stokes eigenmodes while phi and theta stay full PDE fields.
// Pressure is eliminated by the divergence-free basis; the modal system is
// advanced with explicit RK2 (Heun), nonlinear terms evaluated on the grid.

#include <vector>

#include "nschb/coefficients.hpp"
#include "nschb/fields.hpp"
#include "nschb/potential.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

struct GalerkinBasis {
    Grid grid;
    int m = 0;
    std::vector<MACVectorField> modes;  // L2-orthonormal, divergence-free, no-slip
    std::vector<double> eigenvalues;    // ascending, positive

    static GalerkinBasis build(const Grid& g, int m, const SolverConfig& cfg,
                               double mode_tol = 1e-7);
    // Gram-matrix identity to 1e-8, modes solenoidal to solver tolerance
    void validate() const;
};

struct GalerkinProjection {
    std::vector<double> coeffs;
    MACVectorField u_m;
};

GalerkinProjection galerkin_project(const MACVectorField& u, const GalerkinBasis& basis);

// Assembles u = sum c_i w_i.
MACVectorField galerkin_assemble(const std::vector<double>& coeffs, const GalerkinBasis& basis);

// One RK2 step of the modal momentum system
//   d g_j / dt = -(u.grad u, w_j) - (2 nu(theta) D u, D w_j)
//                + (lambda(theta) grad phi x grad phi, grad w_j) + (theta g, w_j).
std::vector<double> galerkin_ns_step(const std::vector<double>& coeffs,
                                     const GalerkinBasis& basis, const ScalarField& phi,
                                     const ScalarField& theta, const PotentialParams& pot,
                                     const CoefficientModel& m, const PhysicalParams& phys,
                                     double dt);

}  // namespace nschb
