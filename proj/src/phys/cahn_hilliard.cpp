#include "nschb/cahn_hilliard.hpp"

#include <cmath>
#include <cstring>

#include "nschb/fastdiag.hpp"
#include "nschb/kernels.hpp"
#include "nschb/krylov.hpp"
#include "nschb/norms.hpp"
#include "nschb/poisson.hpp"

namespace nschb {

namespace {
constexpr double kMargin = 1e-12;
}

double separation_delta(const ScalarField& phi) {
    double m = norm(phi, NormKind::Linf);
    if (!(m < 1.0)) throw std::domain_error("separation_delta: ||phi||_inf >= 1");
    return 1.0 - m;
}

double ch_energy(const ScalarField& phi, const PotentialParams& p) {
    const Grid& g = phi.grid();
    double w = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        w += eval_potential(p, phi.data()[i], PotentialPart::W);
    double h1 = norm(phi, NormKind::H1semi);
    return 0.5 * h1 * h1 + w * g.cell_volume();
}

CHStepResult ch_step(const ScalarField& phi_n, const MACVectorField& u_n,
                     const PotentialParams& p, const CHStepConfig& cfg,
                     const ScalarField* source) {
    cfg.validate();
    p.validate();
    const Grid& g = phi_n.grid();
    const std::size_t n = phi_n.size();
    const double dt = cfg.dt;
    const auto& k = kern::kernels();

    if (!(norm(phi_n, NormKind::Linf) <= 1.0))
        throw std::invalid_argument("ch_step: ||phi^n||_inf must be <= 1");

    // explicit pieces
    ScalarField rhs = advect(phi_n, u_n, cfg.scheme);
    k.scale(dt, rhs.data(), n);
    k.axpy(1.0, phi_n.data(), rhs.data(), n);
    if (source) k.axpy(dt, source->data(), rhs.data(), n);
    const double mass_target = k.sum(rhs.data(), n) / static_cast<double>(n);

    // mu(phi) = -Lap(phi) + F'(phi) - B*phi^n, the expansive part frozen
    ScalarField bphi(g, ScalarBC::HomogeneousNeumann);
    std::memcpy(bphi.data(), phi_n.data(), n * sizeof(double));
    k.scale(p.B, bphi.data(), n);

    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    for (std::size_t i = 0; i < n; ++i) {
        double v = phi_n.data()[i];
        phi.data()[i] = std::max(-1.0 + 1e-9, std::min(1.0 - 1e-9, v));
    }

    ScalarField mu(g, ScalarBC::HomogeneousNeumann);
    auto eval_mu = [&](const ScalarField& ph, ScalarField& out) {
        apply_helmholtz(ph, 0.0, 1.0, out);  // -Lap(phi)
        for (std::size_t i = 0; i < n; ++i)
            out.data()[i] += eval_potential(p, ph.data()[i], PotentialPart::Fp) - bphi.data()[i];
    };
    // R(phi) = phi + dt*(-Lap)(mu(phi)) - rhs
    ScalarField res(g, ScalarBC::HomogeneousNeumann);
    auto residual = [&](const ScalarField& ph, ScalarField& out) {
        eval_mu(ph, mu);
        apply_helmholtz(mu, 0.0, 1.0, out);  // -Lap(mu)
        for (std::size_t i = 0; i < n; ++i)
            out.data()[i] = ph.data()[i] + dt * out.data()[i] - rhs.data()[i];
    };

    residual(phi, res);
    double rnorm = std::sqrt(k.nrm2sq(res.data(), n));
    // convergence target: relative to data, plus the roundoff floor of
    // evaluating the fourth-order residual itself
    const double rhs_norm = std::sqrt(k.nrm2sq(rhs.data(), n));
    const double lmax = 4.0 / (g.dx * g.dx) + 4.0 / (g.dy * g.dy);
    const double floor =
        300.0 * 1.1e-16 * (1.0 + dt * lmax) * (rhs_norm + 1.0);
    const double target =
        cfg.newton.rel_tol * (std::min(rnorm, rhs_norm) + 1e-8) + floor;

    std::vector<double> fpp(n), delta(n), neg(n);
    const FastDiag2D& fd = cell_solver(g, ScalarBC::HomogeneousNeumann);
    ScalarField t1(g, ScalarBC::HomogeneousNeumann), t2(g, ScalarBC::HomogeneousNeumann);

    int it = 0;
    for (; it < cfg.newton.max_iter && rnorm > target; ++it) {
        for (std::size_t i = 0; i < n; ++i) fpp[i] = convex_second(p, phi.data()[i]);
        double fbar = k.sum(fpp.data(), n) / static_cast<double>(n);

        // J = I + dt*(-Lap)(-Lap + F''(phi) .)
        ApplyFn A = [&](const double* x, double* y) {
            std::memcpy(t1.data(), x, n * sizeof(double));
            apply_helmholtz(t1, 0.0, 1.0, t2);  // -Lap x
            for (std::size_t i = 0; i < n; ++i) t2.data()[i] += fpp[i] * x[i];
            apply_helmholtz(t2, 0.0, 1.0, t1);  // -Lap (...)
            for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + dt * t1.data()[i];
        };
        // exact inverse of the frozen-coefficient symbol
        ApplyFn M = [&](const double* x, double* y) {
            std::memcpy(y, x, n * sizeof(double));
            fd.solve_with(y, [&](double lx, double ly) {
                double lam = lx + ly;
                return 1.0 + dt * lam * (lam + fbar);
            });
        };

        for (std::size_t i = 0; i < n; ++i) neg[i] = -res.data()[i];
        std::fill(delta.begin(), delta.end(), 0.0);
        // inexact Newton: loose inner solves far from the root, tight enough
        // near it that one more outer step crosses the target
        double inner_tol = std::min(1e-4, std::max(1e-12, 0.01 * target / rnorm));
        KrylovResult kr = bicgstab(n, A, M, neg.data(), delta.data(), inner_tol, 300);
        if (!kr.converged && kr.rel_residual > 1e-3)
            throw SolverError("ch_step: inner BiCGStab stalled", kr.rel_residual, kr.iters);

        double eta = 1.0;
        bool accepted = false;
        ScalarField trial(g, ScalarBC::HomogeneousNeumann);
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
        if (!accepted) {
            // residual stagnated at its evaluation floor: converged in practice
            if (rnorm <= 100.0 * target) break;
            throw SolverError("ch_step: Newton line search failed (reduce dt)", rnorm, it);
        }
    }
    if (rnorm > 100.0 * target)
        throw SolverError("ch_step: Newton did not converge (reduce dt)", rnorm, it);

    // exact mass conservation: shift by the solver-tolerance-sized mean defect
    double mdef = mass_target - k.sum(phi.data(), n) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) phi.data()[i] += mdef;

    if (!(k.max_abs(phi.data(), n) < 1.0))
        throw SolverError("ch_step: phase bound lost after mean correction", rnorm, it);

    CHStepResult out;
    eval_mu(phi, mu);
    out.phi = std::move(phi);
    out.mu = std::move(mu);
    out.newton_iters = it;
    return out;
}

}  // namespace nschb
