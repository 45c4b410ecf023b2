#include "nschb/diagnostics.hpp"

#include <cmath>

#include "nschb/cahn_hilliard.hpp"
#include "nschb/kernels.hpp"
#include "nschb/navier_stokes.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"
#include "nschb/stokes.hpp"

namespace nschb {

namespace {

// (phi u, grad mu) with phi averaged to faces
double phi_u_grad_mu(const ScalarField& phi, const MACVectorField& u, const ScalarField& mu) {
    const Grid& g = phi.grid();
    MACVectorField gm = grad(mu);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            s += 0.5 * (phi(i - 1, j) + phi(i, j)) * u.ux(i, j) * gm.ux(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += 0.5 * (phi(i, j - 1) + phi(i, j)) * u.uy(i, j) * gm.uy(i, j);
    return s * g.cell_volume();
}

// (grad phi x grad phi, grad u) with cell/node staggering
double phi_tensor_grad_u(const ScalarField& phi, const MACVectorField& u) {
    const Grid& g = phi.grid();
    MACVectorField gp = grad(phi);
    TensorField tu = grad_tensor(u);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gx = 0.5 * (gp.ux(i, j) + gp.ux(i + 1, j));
            double gy = 0.5 * (gp.uy(i, j) + gp.uy(i, j + 1));
            s += (gx * gx * tu.xx(i, j) + gy * gy * tu.yy(i, j)) * g.cell_volume();
        }
    auto gx_node = [&](int i, int j) {
        double a = (j > 0) ? gp.ux(i, j - 1) : gp.ux(i, 0);
        double b = (j < g.ny) ? gp.ux(i, j) : gp.ux(i, g.ny - 1);
        return 0.5 * (a + b);
    };
    auto gy_node = [&](int i, int j) {
        double a = (i > 0) ? gp.uy(i - 1, j) : gp.uy(0, j);
        double b = (i < g.nx) ? gp.uy(i, j) : gp.uy(g.nx - 1, j);
        return 0.5 * (a + b);
    };
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            s += gx_node(i, j) * gy_node(i, j) * (tu.xy(i, j) + tu.yx(i, j)) *
                 node_weight(g, i, j);
    return s;
}

}  // namespace

EnergyReport energy_report(double t, const MACVectorField& u, const ScalarField& phi,
                           const ScalarField& mu, const ScalarField& theta,
                           const ScalarField& theta_t, const PotentialParams& pot,
                           const CoefficientModel& m, double holder_beta) {
    const Grid& g = phi.grid();
    EnergyReport r;
    r.t = t;
    r.kinetic = 0.5 * inner(u, u);
    double h1phi = norm(phi, NormKind::H1semi);
    r.interfacial = 0.5 * h1phi * h1phi;
    double w = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        w += eval_potential(pot, phi.data()[i], PotentialPart::W);
    r.potential_int = w * g.cell_volume();
    r.e1 = m.a * m.lambda0 * (r.interfacial + r.potential_int) + r.kinetic;

    double gmu = norm(mu, NormKind::H1semi);
    r.grad_mu_sq = gmu * gmu;
    double gu = norm(u, NormKind::H1semi);
    r.grad_u_sq = gu * gu;

    ScalarField nu_cells(g, ScalarBC::HomogeneousNeumann);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) nu_cells(i, j) = m.nu(theta(i, j));
    std::vector<double> theta_node = cell_to_node(theta);
    std::vector<double> nu_nodes(theta_node.size());
    for (std::size_t i = 0; i < nu_nodes.size(); ++i) nu_nodes[i] = m.nu(theta_node[i]);
    double diss = 0.5 * viscous_dissipation(u, nu_cells, nu_nodes);  // int nu |Du|^2

    double tt = norm(theta_t, NormKind::L2);
    double coupling = -phi_u_grad_mu(phi, u, mu);  // (u . grad phi, mu) in skew form
    r.beta = diss + 0.5 * r.grad_mu_sq + 0.5 * tt * tt + coupling;

    double l2phi = norm(phi, NormKind::L2);
    double l2mu = norm(mu, NormKind::L2);
    double h1theta = norm(theta, NormKind::H1semi);
    double l2theta = norm(theta, NormKind::L2);
    r.g_script = r.grad_u_sq + l2phi * l2phi + (l2mu * l2mu + r.grad_mu_sq) +
                 (l2theta * l2theta + h1theta * h1theta);
    r.theta_holder = holder_seminorm(theta, holder_beta);
    return r;
}

void energy_report_companions(EnergyReport& r, const MACVectorField& u_prev,
                              const MACVectorField& u_cur, const ScalarField& phi_prev,
                              const ScalarField& phi_cur, const ScalarField& theta_prev,
                              const ScalarField& theta_cur, double dt,
                              const CoefficientModel& m) {
    const Grid& g = phi_cur.grid();
    const auto& k = kern::kernels();
    MACVectorField ut(g);
    k.triad(ut.ux_data(), 1.0 / dt, u_cur.ux_data(), -1.0 / dt, u_prev.ux_data(), g.xfaces());
    k.triad(ut.uy_data(), 1.0 / dt, u_cur.uy_data(), -1.0 / dt, u_prev.uy_data(), g.yfaces());
    ScalarField pt(g, ScalarBC::HomogeneousNeumann), tt(g, ScalarBC::HomogeneousDirichlet);
    k.triad(pt.data(), 1.0 / dt, phi_cur.data(), -1.0 / dt, phi_prev.data(), pt.size());
    k.triad(tt.data(), 1.0 / dt, theta_cur.data(), -1.0 / dt, theta_prev.data(), tt.size());

    double gth = norm(tt, NormKind::H1semi);
    double gph = norm(pt, NormKind::H1semi);
    double lut = norm(ut, NormKind::L2);
    double kap_lo = m.kappa_lo > 0.0 ? m.kappa_lo : m.kappa0;
    r.gamma = 0.5 * kap_lo * gth * gth + 0.25 * gph * gph + 0.5 * lut * lut;
}

double v0prime_norm(const ScalarField& f, const SolverConfig& cfg) {
    const auto& k = kern::kernels();
    double m = k.sum(f.data(), f.size()) / static_cast<double>(f.size());
    double rms = std::sqrt(k.nrm2sq(f.data(), f.size()) / static_cast<double>(f.size()));
    if (std::fabs(m) > 1e-8 * (rms + 1e-300) && rms > 0.0)
        throw CompatibilityError("v0prime_norm: input must be mean-zero");
    if (rms == 0.0) return 0.0;
    ScalarField f0 = f;
    f0.set_bc(ScalarBC::HomogeneousNeumann);
    for (std::size_t i = 0; i < f0.size(); ++i) f0.data()[i] -= m;
    ScalarField a = solve_neumann_poisson(f0, cfg);
    return norm(a, NormKind::H1semi);
}

double vsigma_prime_norm(const MACVectorField& g, const SolverConfig& cfg) {
    StokesSolution s = solve_stokes(g, cfg);
    return norm(s.u, NormKind::H1semi);
}

double kronecker_residual(const ScalarField& phi, const MACVectorField& u,
                          const PotentialParams& pot) {
    if (!(norm(phi, NormKind::Linf) < 1.0))
        throw std::domain_error("kronecker_residual: |phi| >= 1");
    ScalarField mu = laplacian(phi);
    for (std::size_t i = 0; i < mu.size(); ++i)
        mu.data()[i] = -mu.data()[i] + eval_potential(pot, phi.data()[i], PotentialPart::Wp);
    return std::fabs(phi_tensor_grad_u(phi, u) + phi_u_grad_mu(phi, u, mu));
}

double continuous_dependence_lambda(const MACVectorField& u1, const ScalarField& phi1,
                                    const ScalarField& theta1, const MACVectorField& u2,
                                    const ScalarField& phi2, const ScalarField& theta2,
                                    const SolverConfig& cfg) {
    if (u1.grid() != u2.grid() || phi1.grid() != phi2.grid() || theta1.grid() != theta2.grid())
        throw std::invalid_argument("continuous_dependence_lambda: grid mismatch");
    const Grid& g = phi1.grid();
    const auto& k = kern::kernels();

    MACVectorField du(g);
    k.triad(du.ux_data(), 1.0, u1.ux_data(), -1.0, u2.ux_data(), g.xfaces());
    k.triad(du.uy_data(), 1.0, u1.uy_data(), -1.0, u2.uy_data(), g.yfaces());
    ScalarField dphi(g, ScalarBC::HomogeneousNeumann);
    k.triad(dphi.data(), 1.0, phi1.data(), -1.0, phi2.data(), dphi.size());
    double m = mean(dphi);
    for (std::size_t i = 0; i < dphi.size(); ++i) dphi.data()[i] -= m;
    ScalarField dth(g, ScalarBC::HomogeneousDirichlet);
    k.triad(dth.data(), 1.0, theta1.data(), -1.0, theta2.data(), dth.size());

    double a = 0.0;
    if (norm(du, NormKind::Linf) > 0.0) a = vsigma_prime_norm(du, cfg);
    double b = 0.0;
    if (norm(dphi, NormKind::Linf) > 0.0) b = v0prime_norm(dphi, cfg);
    double c = norm(dth, NormKind::L2);
    return a * a + b * b + c * c;
}

InequalitySample inequality_sample(const MACVectorField& u, const ScalarField& phi,
                                   const ScalarField& mu, const PotentialParams& pot) {
    const Grid& g = phi.grid();
    InequalitySample s;

    TensorField d = sym_grad(u);
    double dn = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            dn += (d.xx(i, j) * d.xx(i, j) + d.yy(i, j) * d.yy(i, j)) * g.cell_volume();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            dn += 2.0 * d.xy(i, j) * d.xy(i, j) * node_weight(g, i, j);
    double gu = norm(u, NormKind::H1semi);
    if (dn > 0.0) s.korn_ratio = gu / std::sqrt(dn);

    double h2 = norm(phi, NormKind::H2);
    double l2 = norm(phi, NormKind::L2);
    double cross = inner(grad(mu), grad(phi));
    double denom = l2 * l2 + std::max(cross, 0.0);
    if (denom > 1e-30) s.h2_bound_ratio = h2 * h2 / denom;

    double wl1 = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i)
        wl1 += std::fabs(eval_potential(pot, phi.data()[i], PotentialPart::Wp));
    wl1 *= g.cell_volume();
    s.meanmu_ratio = (std::fabs(mean(mu)) + wl1) / (1.0 + norm(mu, NormKind::H1semi));

    s.degenerate = gu == 0.0 && l2 == 0.0;
    return s;
}

void InequalityScan::add_state(const MACVectorField& u, const ScalarField& phi,
                               const ScalarField& mu, const PotentialParams& pot) {
    InequalitySample s = inequality_sample(u, phi, mu, pot);
    if (s.degenerate) return;
    korn_max_ = std::max(korn_max_, s.korn_ratio);
    h2_bound_max_ = std::max(h2_bound_max_, s.h2_bound_ratio);
    meanmu_max_ = std::max(meanmu_max_, s.meanmu_ratio);
}

void InequalityScan::add_theta(const ScalarField& theta) {
    double w14 = w14_norm(theta);
    double cg = norm(theta, NormKind::Linf) + holder_seminorm(theta, gamma_);
    double h2 = norm(theta, NormKind::H2);
    if (w14 <= 0.0 || cg <= 0.0 || h2 <= 0.0) return;
    w14_.push_back(w14);
    cgam_.push_back(cg);
    h2_.push_back(h2);
}

InequalityScan::XiFit InequalityScan::interpolation_exponent_fit() const {
    XiFit fit;
    if (w14_.empty()) return fit;
    double best_c = 1e300;
    for (int k = 1; k <= 48; ++k) {
        double xi = 0.5 + 0.5 * k / 49.0;  // interior grid on (1/2, 1)
        double c = 0.0;
        for (std::size_t i = 0; i < w14_.size(); ++i)
            c = std::max(c, w14_[i] / (std::pow(cgam_[i], xi) * std::pow(h2_[i], 1.0 - xi)));
        if (c < best_c) {
            best_c = c;
            fit.xi = xi;
        }
    }
    fit.constant = best_c;
    fit.valid = true;
    return fit;
}

void InvariantAccumulator::observe(const MACVectorField& u, const ScalarField& phi,
                                   const ScalarField& theta) {
    double mphi = mean(phi);
    double tmax = norm(theta, NormKind::Linf);
    if (first_) {
        mass0_ = mphi;
        theta_max0_ = tmax;
        if (track_energy_) energy_prev_ = ch_energy(phi, pot_);
        first_ = false;
    } else {
        rep_.mass_drift = std::max(rep_.mass_drift, std::fabs(mphi - mass0_));
        rep_.theta_max_excess = std::max(rep_.theta_max_excess, std::max(tmax - theta_max0_, 0.0));
        if (track_energy_) {
            double e = ch_energy(phi, pot_);
            if (e > energy_prev_ + 1e-10) ++rep_.energy_violations;
            energy_prev_ = e;
        }
    }
    rep_.min_separation = std::min(rep_.min_separation, separation_delta(phi));
    rep_.divergence_max = std::max(rep_.divergence_max, norm(div(u), NormKind::Linf));
}

}  // namespace nschb
