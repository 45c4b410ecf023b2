#pragma once
// The singular Flory-Huggins potential
//   W(phi) = (A/2)[(1+phi)ln(1+phi) + (1-phi)ln(1-phi)] - (B/2) phi^2
// with 0 < A < B, its convex part F (the log terms), and first/second
// derivatives. Valid strictly inside (-1,1); crossing the bound is a solver
// bug and raises std::domain_error.

#include <stdexcept>

namespace nschb {

struct PotentialParams {
    double A = 1.0;
    double B = 2.0;

    PotentialParams() = default;
    PotentialParams(double A_, double B_) : A(A_), B(B_) { validate(); }
    void validate() const {
        if (!(0.0 < A && A < B))
            throw std::invalid_argument("PotentialParams: need 0 < A < B");
    }
    // W''(phi) >= -alpha with alpha = B - A, attained at phi = 0
    double alpha() const { return B - A; }
};

enum class PotentialPart { W, Wp, Wpp, F, Fp };

double eval_potential(const PotentialParams& p, double phi, PotentialPart which);

// second derivative of the convex part, A / (1 - phi^2)
inline double convex_second(const PotentialParams& p, double phi) {
    return p.A / ((1.0 - phi) * (1.0 + phi));
}

// third derivative of W (= of F), used by manufactured-solution sources
inline double potential_third(const PotentialParams& p, double phi) {
    double om = (1.0 - phi) * (1.0 + phi);
    return 2.0 * p.A * phi / (om * om);
}

}  // namespace nschb
