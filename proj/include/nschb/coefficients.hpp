#pragma once
// Temperature-dependent coefficients: viscosity nu(theta), conductivity
// kappa(theta), and the Eotvos surface tension lambda(theta) = lambda0*(a - b*theta).
//
// nu and kappa come from the two-parameter family  c0 + c1*tanh(theta), which
// is smooth, has bounded first and second derivatives, and stays inside
// [c0 - |c1|, c0 + |c1|]; c1 = 0 gives the constant model.

#include <cmath>
#include <stdexcept>

namespace nschb {

struct CoefficientModel {
    double nu0 = 1.0, nu1 = 0.1;
    double kappa0 = 1.0, kappa1 = 0.1;
    double lambda0 = 1.0, a = 1.0, b = 0.25;
    // attainable temperature range [-theta_max, theta_max]; the maximum
    // principle keeps any trajectory inside it once it holds initially
    double theta_max = 4.0;
    // declared coefficient bounds
    double nu_lo = 0.0, nu_hi = 0.0, kappa_lo = 0.0, kappa_hi = 0.0;

    void finalize() {
        double t = std::tanh(theta_max);
        nu_lo = nu0 - std::fabs(nu1) * t;
        nu_hi = nu0 + std::fabs(nu1) * t;
        kappa_lo = kappa0 - std::fabs(kappa1) * t;
        kappa_hi = kappa0 + std::fabs(kappa1) * t;
        if (!(nu_lo > 0.0) || !(kappa_lo > 0.0))
            throw std::invalid_argument("CoefficientModel: nu, kappa must stay positive");
    }

    double nu(double theta) const { return nu0 + nu1 * std::tanh(theta); }
    double kappa(double theta) const { return kappa0 + kappa1 * std::tanh(theta); }
    double lambda(double theta) const { return lambda0 * (a - b * theta); }
    double lambda_prime() const { return -lambda0 * b; }
};

struct Coefficients {
    double nu, kappa, lambda;
};

// Evaluates all three at one temperature; range error if theta has left the
// attainable range (a maximum-principle violation upstream).
Coefficients eval_coefficients(const CoefficientModel& m, double theta);

struct PhysicalParams {
    double Ra = 1.0;
    double Ga = 0.0;
    double g = 1.0;
};

}  // namespace nschb
