#pragma once
// Convective Cahn-Hilliard step with convex splitting: the convex part F' is
// implicit, the expansive -B*phi explicit, convection explicit in (u^n, phi^n).
// One damped Newton solve per step on the phi block keeps every iterate
// strictly inside (-1,1); cell means are conserved exactly.

#include "nschb/fields.hpp"
#include "nschb/operators.hpp"
#include "nschb/potential.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

struct CHStepConfig {
    double dt = 1e-3;
    SolverConfig newton;
    ConvectionScheme scheme = ConvectionScheme::Upwind;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("CHStepConfig: dt must be > 0");
        newton.validate();
    }
};

struct CHStepResult {
    ScalarField phi;
    ScalarField mu;
    int newton_iters = 0;
};

// Advances (phi^{n+1} - phi^n)/dt + div(u^n phi^n) = Lap(mu^{n+1}),
// mu^{n+1} = -Lap(phi^{n+1}) + F'(phi^{n+1}) - B phi^n [+ source if given].
CHStepResult ch_step(const ScalarField& phi_n, const MACVectorField& u_n,
                     const PotentialParams& p, const CHStepConfig& cfg,
                     const ScalarField* source = nullptr);

// Instantaneous separation margin 1 - ||phi||_inf; domain error at >= 1.
double separation_delta(const ScalarField& phi);

// Decoupled free energy E_CH = 1/2 ||grad phi||^2 + int W(phi).
double ch_energy(const ScalarField& phi, const PotentialParams& p);

}  // namespace nschb
