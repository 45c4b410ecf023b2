#pragma once
// Momentum step: skew-symmetric explicit advection, semi-implicit
// variable-viscosity diffusion in symmetric-stress form, capillary forcing in
// conservative (divergence) form, Rayleigh-Galileo buoyancy, Chorin-type
// pressure projection with Neumann pressure.

#include "nschb/coefficients.hpp"
#include "nschb/fields.hpp"
#include "nschb/potential.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

struct NSStepConfig {
    enum class ViscousTreatment { SemiImplicit, Explicit };

    double dt = 1e-3;
    ViscousTreatment viscous = ViscousTreatment::SemiImplicit;
    SolverConfig linear;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("NSStepConfig: dt must be > 0");
        linear.validate();
    }
};

// -div(sigma) on faces, sigma = lambda(theta)(grad phi x grad phi)
//                              + lambda(theta)(|grad phi|^2/2 + W(phi)) I.
MACVectorField capillary_force(const ScalarField& phi, const ScalarField& theta,
                               const PotentialParams& p, const CoefficientModel& m);

struct NSStepResult {
    MACVectorField u;
    ScalarField p;
    int solver_iters = 0;
};

NSStepResult ns_step(const MACVectorField& u_n, const ScalarField& phi, const ScalarField& theta,
                     const PhysicalParams& phys, const CoefficientModel& m,
                     const PotentialParams& pot, const NSStepConfig& cfg,
                     const MACVectorField* extra_force = nullptr);

// (u/dt - div(2 nu D(u))) u = rhs with no-slip walls; SPD, solved by PCG with
// a decoupled constant-coefficient preconditioner.
MACVectorField solve_viscous_helmholtz(const MACVectorField& rhs, double inv_dt,
                                       const ScalarField& nu_cells,
                                       const std::vector<double>& nu_nodes,
                                       const SolverConfig& cfg, int* iters_out = nullptr);

// Quadrature of int 2 nu(theta) |D u|^2 consistent with the implicit operator
// (exact discrete dissipation identity).
double viscous_dissipation(const MACVectorField& u, const ScalarField& nu_cells,
                           const std::vector<double>& nu_nodes);

}  // namespace nschb
