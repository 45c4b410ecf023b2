#include "nschb/potential.hpp"

#include <cmath>

namespace nschb {

double eval_potential(const PotentialParams& p, double phi, PotentialPart which) {
    p.validate();
    if (!(std::fabs(phi) < 1.0))
        throw std::domain_error("eval_potential: |phi| >= 1 (strict bound lost)");
    // log1p forms stay accurate as phi -> +-1, where Newton evaluates them
    const double lp = std::log1p(phi);   // ln(1+phi)
    const double lm = std::log1p(-phi);  // ln(1-phi)
    switch (which) {
        case PotentialPart::W:
            return 0.5 * p.A * ((1.0 + phi) * lp + (1.0 - phi) * lm) - 0.5 * p.B * phi * phi;
        case PotentialPart::Wp:
            return 0.5 * p.A * (lp - lm) - p.B * phi;
        case PotentialPart::Wpp:
            return p.A / ((1.0 - phi) * (1.0 + phi)) - p.B;
        case PotentialPart::F:
            return 0.5 * p.A * ((1.0 + phi) * lp + (1.0 - phi) * lm);
        case PotentialPart::Fp:
            return 0.5 * p.A * (lp - lm);
    }
    return 0.0;
}

}  // namespace nschb
