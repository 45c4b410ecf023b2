#include "nschb/coefficients.hpp"

namespace nschb {

Coefficients eval_coefficients(const CoefficientModel& m, double theta) {
    if (!(std::fabs(theta) <= m.theta_max * (1.0 + 1e-12)))
        throw std::range_error("eval_coefficients: theta outside the attainable range");
    return {m.nu(theta), m.kappa(theta), m.lambda(theta)};
}

}  // namespace nschb
