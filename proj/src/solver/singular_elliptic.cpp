#include "nschb/singular_elliptic.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "nschb/fastdiag.hpp"
#include "nschb/kernels.hpp"
#include "nschb/krylov.hpp"
#include "nschb/poisson.hpp"

namespace nschb {

namespace {
constexpr double kMargin = 1e-12;  // iterates stay within |phi| <= 1 - kMargin
}

ScalarField solve_singular_elliptic(const ScalarField& mu_tilde, const PotentialParams& p,
                                    const SolverConfig& cfg) {
    cfg.validate();
    p.validate();
    const Grid& g = mu_tilde.grid();
    const std::size_t n = mu_tilde.size();
    const auto& k = kern::kernels();

    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField res(g, ScalarBC::HomogeneousNeumann);
    ScalarField lap(g, ScalarBC::HomogeneousNeumann);
    std::vector<double> fpp(n), delta(n);

    auto residual = [&](const ScalarField& ph, ScalarField& out) {
        apply_helmholtz(ph, 0.0, 1.0, out);  // -Lap(phi)
        for (std::size_t i = 0; i < n; ++i)
            out.data()[i] += eval_potential(p, ph.data()[i], PotentialPart::Fp) -
                             mu_tilde.data()[i];
    };

    residual(phi, res);
    double rnorm = std::sqrt(k.nrm2sq(res.data(), n));
    const double scale = std::sqrt(k.nrm2sq(mu_tilde.data(), n)) + 1.0;
    const double target = cfg.rel_tol * scale;

    const FastDiag2D& fd = cell_solver(g, ScalarBC::HomogeneousNeumann);

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (rnorm <= target) return phi;

        for (std::size_t i = 0; i < n; ++i) fpp[i] = convex_second(p, phi.data()[i]);
        double fpp_bar = k.sum(fpp.data(), n) / static_cast<double>(n);

        ApplyFn A = [&](const double* x, double* y) {
            std::memcpy(lap.data(), x, n * sizeof(double));
            apply_helmholtz(lap, 0.0, 1.0, res);  // reuse res as scratch output
            for (std::size_t i = 0; i < n; ++i) y[i] = res.data()[i] + fpp[i] * x[i];
        };
        ApplyFn M = [&](const double* x, double* y) {
            std::memcpy(y, x, n * sizeof(double));
            fd.solve(fpp_bar, 1.0, y);
        };

        residual(phi, res);
        std::vector<double> rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs[i] = -res.data()[i];
        std::fill(delta.begin(), delta.end(), 0.0);
        KrylovResult kr =
            pcg(n, A, M, rhs.data(), delta.data(), std::max(cfg.rel_tol * 0.1, 1e-14), 400);
        if (!kr.converged && kr.rel_residual > 1e-6)
            throw SolverError("singular elliptic: inner PCG stalled", kr.rel_residual, kr.iters);

        // damped update: keep the barrier and require residual decrease
        double eta = 1.0;
        ScalarField trial = phi;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            std::memcpy(trial.data(), phi.data(), n * sizeof(double));
            k.axpy(eta, delta.data(), trial.data(), n);
            if (k.max_abs(trial.data(), n) <= 1.0 - kMargin) {
                residual(trial, res);
                double rn = std::sqrt(k.nrm2sq(res.data(), n));
                if (rn < rnorm || rn <= target) {
                    phi = trial;
                    rnorm = rn;
                    accepted = true;
                    break;
                }
            }
            eta *= 0.5;
        }
        if (!accepted)
            throw SolverError("singular elliptic: line search failed", rnorm, it);
    }
    if (rnorm <= target) return phi;
    throw SolverError("singular elliptic: Newton did not converge", rnorm, cfg.max_iter);
}

}  // namespace nschb
