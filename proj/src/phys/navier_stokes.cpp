#include "nschb/navier_stokes.hpp"

#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "nschb/fastdiag.hpp"
#include "nschb/kernels.hpp"
#include "nschb/krylov.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"

namespace nschb {

namespace {

// interior-face packing for the coupled velocity solve
std::size_t packed_size(const Grid& g) {
    return static_cast<std::size_t>((g.nx - 1) * g.ny) + static_cast<std::size_t>(g.nx * (g.ny - 1));
}

void pack(const MACVectorField& u, double* out) {
    const Grid& g = u.grid();
    std::size_t c = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) out[c++] = u.ux(i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out[c++] = u.uy(i, j);
}

void unpack(const double* in, MACVectorField& u) {
    const Grid& g = u.grid();
    std::size_t c = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.ux(i, j) = in[c++];
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.uy(i, j) = in[c++];
}

const FastDiag2D& ux_fd(const Grid& g) {
    static std::map<std::tuple<int, int, double, double>, std::unique_ptr<FastDiag2D>> cache;
    static std::mutex mu;
    auto key = std::make_tuple(g.nx, g.ny, g.lx, g.ly);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache
                 .emplace(key, std::make_unique<FastDiag2D>(Basis1DKind::FaceInterior, g.nx, g.dx,
                                                            Basis1DKind::CellDirichlet, g.ny,
                                                            g.dy))
                 .first;
    return *it->second;
}

const FastDiag2D& uy_fd(const Grid& g) {
    static std::map<std::tuple<int, int, double, double>, std::unique_ptr<FastDiag2D>> cache;
    static std::mutex mu;
    auto key = std::make_tuple(g.nx, g.ny, g.lx, g.ly);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache
                 .emplace(key, std::make_unique<FastDiag2D>(Basis1DKind::CellDirichlet, g.nx, g.dx,
                                                            Basis1DKind::FaceInterior, g.ny,
                                                            g.dy))
                 .first;
    return *it->second;
}

}  // namespace

MACVectorField capillary_force(const ScalarField& phi, const ScalarField& theta,
                               const PotentialParams& p, const CoefficientModel& m) {
    const Grid& g = phi.grid();
    if (!(norm(phi, NormKind::Linf) < 1.0))
        throw std::domain_error("capillary_force: |phi| >= 1");

    MACVectorField gp = grad(phi);
    std::vector<double> theta_node = cell_to_node(theta);

    // gradient components averaged to cells and nodes
    std::vector<double> sxx(static_cast<std::size_t>(g.cells()));
    std::vector<double> syy(static_cast<std::size_t>(g.cells()));
    std::vector<double> sxy(static_cast<std::size_t>(g.nodes()));

    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gx = 0.5 * (gp.ux(i, j) + gp.ux(i + 1, j));
            double gy = 0.5 * (gp.uy(i, j) + gp.uy(i, j + 1));
            double lam = m.lambda(theta(i, j));
            double iso = 0.5 * (gx * gx + gy * gy) +
                         eval_potential(p, phi(i, j), PotentialPart::W);
            sxx[g.cidx(i, j)] = lam * (gx * gx + iso);
            syy[g.cidx(i, j)] = lam * (gy * gy + iso);
        }
    // node off-diagonal: gx from x-faces above/below, gy from y-faces left/right
    auto gx_node = [&](int i, int j) {
        double a = (j > 0) ? gp.ux(i, j - 1) : gp.ux(i, 0);
        double b = (j < g.ny) ? gp.ux(i, j) : gp.ux(i, g.ny - 1);
        return 0.5 * (a + b);  // Neumann: even extension of d(phi)/dx across walls
    };
    auto gy_node = [&](int i, int j) {
        double a = (i > 0) ? gp.uy(i - 1, j) : gp.uy(0, j);
        double b = (i < g.nx) ? gp.uy(i, j) : gp.uy(g.nx - 1, j);
        return 0.5 * (a + b);
    };
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double lam = m.lambda(theta_node[g.nidx(i, j)]);
            sxy[g.nidx(i, j)] = lam * gx_node(i, j) * gy_node(i, j);
        }

    MACVectorField f(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            f.ux(i, j) = -((sxx[g.cidx(i, j)] - sxx[g.cidx(i - 1, j)]) * idx +
                           (sxy[g.nidx(i, j + 1)] - sxy[g.nidx(i, j)]) * idy);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f.uy(i, j) = -((sxy[g.nidx(i + 1, j)] - sxy[g.nidx(i, j)]) * idx +
                           (syy[g.cidx(i, j)] - syy[g.cidx(i, j - 1)]) * idy);
    return f;
}

MACVectorField solve_viscous_helmholtz(const MACVectorField& rhs, double inv_dt,
                                       const ScalarField& nu_cells,
                                       const std::vector<double>& nu_nodes,
                                       const SolverConfig& cfg, int* iters_out) {
    cfg.validate();
    const Grid& g = rhs.grid();
    const std::size_t n = packed_size(g);
    const std::size_t nux = static_cast<std::size_t>((g.nx - 1) * g.ny);
    double nubar = mean(nu_cells);

    std::vector<double> b(n), x(n, 0.0);
    pack(rhs, b.data());

    MACVectorField uf(g), yf(g);
    ApplyFn A = [&](const double* xin, double* yout) {
        unpack(xin, uf);
        MACVectorField visc = viscous_divergence(uf, nu_cells, nu_nodes);
        const auto& k = kern::kernels();
        k.triad(yf.ux_data(), inv_dt, uf.ux_data(), -1.0, visc.ux_data(), g.xfaces());
        k.triad(yf.uy_data(), inv_dt, uf.uy_data(), -1.0, visc.uy_data(), g.yfaces());
        pack(yf, yout);
    };
    // preconditioner: decoupled constant-nu stress symbol per component
    const FastDiag2D& fx = ux_fd(g);
    const FastDiag2D& fy = uy_fd(g);
    ApplyFn M = [&](const double* xin, double* yout) {
        std::memcpy(yout, xin, n * sizeof(double));
        fx.solve_anisotropic(inv_dt, 2.0 * nubar, nubar, yout);
        fy.solve_anisotropic(inv_dt, nubar, 2.0 * nubar, yout + nux);
    };

    KrylovResult kr = pcg(n, A, M, b.data(), x.data(), cfg.rel_tol, cfg.max_iter);
    if (!kr.converged)
        throw SolverError("viscous solve did not converge", kr.rel_residual, kr.iters);
    if (iters_out) *iters_out = kr.iters;
    MACVectorField out(g);
    unpack(x.data(), out);
    return out;
}

double viscous_dissipation(const MACVectorField& u, const ScalarField& nu_cells,
                           const std::vector<double>& nu_nodes) {
    const Grid& g = u.grid();
    TensorField d = sym_grad(u);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += 2.0 * nu_cells(i, j) * (d.xx(i, j) * d.xx(i, j) + d.yy(i, j) * d.yy(i, j)) *
                 g.cell_volume();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            s += 4.0 * nu_nodes[g.nidx(i, j)] * d.xy(i, j) * d.xy(i, j) * node_weight(g, i, j);
    return s;
}

NSStepResult ns_step(const MACVectorField& u_n, const ScalarField& phi, const ScalarField& theta,
                     const PhysicalParams& phys, const CoefficientModel& m,
                     const PotentialParams& pot, const NSStepConfig& cfg,
                     const MACVectorField* extra_force) {
    cfg.validate();
    const Grid& g = u_n.grid();
    const double dt = cfg.dt;
    const auto& k = kern::kernels();

    ScalarField nu_cells(g, ScalarBC::HomogeneousNeumann);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) nu_cells(i, j) = m.nu(theta(i, j));
    std::vector<double> theta_node = cell_to_node(theta);
    std::vector<double> nu_nodes(theta_node.size());
    for (std::size_t i = 0; i < nu_nodes.size(); ++i) nu_nodes[i] = m.nu(theta_node[i]);

    // rhs = u^n/dt - N(u^n) + Fcap + buoyancy (+ extra)
    MACVectorField rhs(g);
    {
        MACVectorField adv = momentum_advection(u_n);
        MACVectorField cap = capillary_force(phi, theta, pot, m);
        k.triad(rhs.ux_data(), 1.0 / dt, u_n.ux_data(), -1.0, adv.ux_data(), g.xfaces());
        k.triad(rhs.uy_data(), 1.0 / dt, u_n.uy_data(), -1.0, adv.uy_data(), g.yfaces());
        k.axpy(1.0, cap.ux_data(), rhs.ux_data(), g.xfaces());
        k.axpy(1.0, cap.uy_data(), rhs.uy_data(), g.yfaces());
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double tf = 0.5 * (theta(i, j - 1) + theta(i, j));
                rhs.uy(i, j) += (phys.Ra * tf - phys.Ga) * phys.g;
            }
        if (extra_force) {
            k.axpy(1.0, extra_force->ux_data(), rhs.ux_data(), g.xfaces());
            k.axpy(1.0, extra_force->uy_data(), rhs.uy_data(), g.yfaces());
        }
        rhs.apply_noslip();
    }

    NSStepResult out;
    MACVectorField star(g);
    if (cfg.viscous == NSStepConfig::ViscousTreatment::SemiImplicit) {
        star = solve_viscous_helmholtz(rhs, 1.0 / dt, nu_cells, nu_nodes, cfg.linear,
                                       &out.solver_iters);
    } else {
        MACVectorField visc = viscous_divergence(u_n, nu_cells, nu_nodes);
        k.triad(star.ux_data(), dt, rhs.ux_data(), dt, visc.ux_data(), g.xfaces());
        k.triad(star.uy_data(), dt, rhs.uy_data(), dt, visc.uy_data(), g.yfaces());
        star.apply_noslip();
    }

    out.p = ScalarField(g, ScalarBC::HomogeneousNeumann);
    leray_project(star, &out.p, 1.0 / dt);
    star.apply_noslip();
    out.u = std::move(star);
    return out;
}

}  // namespace nschb
