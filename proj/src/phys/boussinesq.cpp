#include "nschb/boussinesq.hpp"

#include <cmath>
#include <stdexcept>

#include "nschb/kernels.hpp"
#include "nschb/poisson.hpp"

namespace nschb {

namespace {

double adaptive_simpson(const CoefficientModel& m, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
    double c = 0.5 * (a + b);
    double lm = m.kappa(0.5 * (a + c)), rm = m.kappa(0.5 * (c + b));
    double left = (c - a) / 6.0 * (fa + 4.0 * lm + fm);
    double right = (b - c) / 6.0 * (fm + 4.0 * rm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(m, a, c, fa, lm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, c, b, fm, rm, fb, right, 0.5 * tol, depth - 1);
}

double kirchhoff_value(const CoefficientModel& m, double theta) {
    if (theta == 0.0) return 0.0;
    double fa = m.kappa(0.0), fb = m.kappa(theta), fm = m.kappa(0.5 * theta);
    if (!std::isfinite(fa) || !std::isfinite(fb) || !std::isfinite(fm))
        throw std::runtime_error("kirchhoff_transform: non-finite conductivity");
    double whole = theta / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(m, 0.0, theta, fa, fm, fb, whole, 1e-13 * std::fabs(theta) + 1e-15,
                            40);
}

}  // namespace

ScalarField theta_step(const ScalarField& theta_n, const MACVectorField& u_n,
                       const CoefficientModel& m, double dt, ConvectionScheme scheme,
                       const SolverConfig& cfg, const ScalarField* source) {
    if (!(dt > 0.0)) throw std::invalid_argument("theta_step: dt must be > 0");
    if (theta_n.bc() != ScalarBC::HomogeneousDirichlet)
        throw std::invalid_argument("theta_step: theta must carry Dirichlet bc");
    const Grid& g = theta_n.grid();
    const std::size_t n = theta_n.size();
    const auto& k = kern::kernels();

    ScalarField star = advect(theta_n, u_n, scheme);
    k.scale(dt, star.data(), n);
    k.axpy(1.0, theta_n.data(), star.data(), n);
    if (source) k.axpy(dt, source->data(), star.data(), n);

    // frozen conductivity, Neumann extension for face averages
    ScalarField kappa(g, ScalarBC::HomogeneousNeumann);
    for (std::size_t i = 0; i < n; ++i) kappa.data()[i] = dt * m.kappa(theta_n.data()[i]);

    return solve_var_diffusion(star, 1.0, kappa, cfg);
}

ScalarField kirchhoff_transform(const ScalarField& theta, const CoefficientModel& m) {
    ScalarField out(theta.grid(), theta.bc());
    for (std::size_t i = 0; i < theta.size(); ++i)
        out.data()[i] = kirchhoff_value(m, theta.data()[i]);
    return out;
}

}  // namespace nschb
