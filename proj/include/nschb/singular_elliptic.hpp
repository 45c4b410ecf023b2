#pragma once
// Globalized Newton solve of the singular Neumann problem
//   -Lap(phi) + F'(phi) = mu_tilde,   dn(phi) = 0,
// where F' is the logarithmic barrier. The line search halves the step until
// the iterate stays strictly inside (-1,1) and the residual decreases, so no
// iterate (and no result) ever reaches |phi| = 1.

#include "nschb/fields.hpp"
#include "nschb/potential.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

ScalarField solve_singular_elliptic(const ScalarField& mu_tilde, const PotentialParams& p,
                                    const SolverConfig& cfg);

}  // namespace nschb
