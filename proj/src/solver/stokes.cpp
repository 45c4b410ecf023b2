#include "nschb/stokes.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <tuple>

#include "nschb/fastdiag.hpp"
#include "nschb/kernels.hpp"
#include "nschb/krylov.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"

namespace nschb {

namespace {

const FastDiag2D& ux_solver(const Grid& g) {
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

const FastDiag2D& uy_solver(const Grid& g) {
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

MACVectorField apply_vector_laplacian(const MACVectorField& u) {
    const Grid& g = u.grid();
    MACVectorField out(g);
    const double ix2 = 1.0 / (g.dx * g.dx), iy2 = 1.0 / (g.dy * g.dy);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.ux(i, j) = (u.ux(i - 1, j) - 2.0 * u.ux(i, j) + u.ux(i + 1, j)) * ix2 +
                           (u.ux_at(i, j - 1) - 2.0 * u.ux(i, j) + u.ux_at(i, j + 1)) * iy2;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.uy(i, j) = (u.uy_at(i - 1, j) - 2.0 * u.uy(i, j) + u.uy_at(i + 1, j)) * ix2 +
                           (u.uy(i, j - 1) - 2.0 * u.uy(i, j) + u.uy(i, j + 1)) * iy2;
    return out;
}

MACVectorField vector_laplacian_inverse(const MACVectorField& rhs) {
    const Grid& g = rhs.grid();
    MACVectorField out(g);
    // ux: (nx-1) x ny interior faces
    {
        const int m = g.nx - 1;
        std::vector<double> buf(static_cast<std::size_t>(m) * g.ny);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                buf[static_cast<std::size_t>(j) * m + (i - 1)] = rhs.ux(i, j);
        ux_solver(g).solve(0.0, 1.0, buf.data());
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                out.ux(i, j) = buf[static_cast<std::size_t>(j) * m + (i - 1)];
    }
    // uy: nx x (ny-1)
    {
        std::vector<double> buf(static_cast<std::size_t>(g.nx) * (g.ny - 1));
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                buf[static_cast<std::size_t>(j - 1) * g.nx + i] = rhs.uy(i, j);
        uy_solver(g).solve(0.0, 1.0, buf.data());
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                out.uy(i, j) = buf[static_cast<std::size_t>(j - 1) * g.nx + i];
    }
    return out;
}

double grad_inner(const MACVectorField& u, const MACVectorField& v) {
    const Grid& g = u.grid();
    TensorField tu = grad_tensor(u), tv = grad_tensor(v);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += (tu.xx(i, j) * tv.xx(i, j) + tu.yy(i, j) * tv.yy(i, j)) * g.cell_volume();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            s += (tu.xy(i, j) * tv.xy(i, j) + tu.yx(i, j) * tv.yx(i, j)) * node_weight(g, i, j);
    return s;
}

StokesSolution solve_stokes(const MACVectorField& g, const SolverConfig& cfg) {
    cfg.validate();
    const Grid& gr = g.grid();
    const std::size_t np = static_cast<std::size_t>(gr.cells());

    // Schur complement: D A^{-1} G is negative definite, so CG runs on its
    // negation: (-D A^{-1} G) p = -D A^{-1} g.
    MACVectorField w = vector_laplacian_inverse(g);
    ScalarField bp = div(w);
    {
        double m = mean(bp);
        for (std::size_t i = 0; i < np; ++i) bp.data()[i] = -(bp.data()[i] - m);
    }

    ScalarField pin(gr, ScalarBC::HomogeneousNeumann);
    ApplyFn A = [&](const double* q, double* y) {
        std::memcpy(pin.data(), q, np * sizeof(double));
        MACVectorField gq = grad(pin);
        MACVectorField z = vector_laplacian_inverse(gq);
        ScalarField dz = div(z);
        double m = mean(dz);
        for (std::size_t i = 0; i < np; ++i) y[i] = -(dz.data()[i] - m);
    };

    StokesSolution sol;
    sol.p = ScalarField(gr, ScalarBC::HomogeneousNeumann);
    KrylovResult kr = pcg(np, A, nullptr, bp.data(), sol.p.data(), cfg.rel_tol, cfg.max_iter);
    if (!kr.converged)
        throw SolverError("Stokes Schur-complement CG did not converge", kr.rel_residual,
                          kr.iters);
    {
        double m = mean(sol.p);
        for (std::size_t i = 0; i < np; ++i) sol.p.data()[i] -= m;
    }

    MACVectorField gp = grad(sol.p);
    MACVectorField r(gr);
    const auto& k = kern::kernels();
    k.triad(r.ux_data(), 1.0, g.ux_data(), -1.0, gp.ux_data(), gr.xfaces());
    k.triad(r.uy_data(), 1.0, g.uy_data(), -1.0, gp.uy_data(), gr.yfaces());
    sol.u = vector_laplacian_inverse(r);
    sol.u.apply_noslip();
    sol.iters = kr.iters;
    sol.rel_residual = kr.rel_residual;
    return sol;
}

StokesModes stokes_eigenmodes(const Grid& g, int m, const SolverConfig& cfg, int max_modes,
                              double mode_tol) {
    cfg.validate();
    if (m < 1 || m > max_modes)
        throw std::invalid_argument("stokes_eigenmodes: mode count out of range");

    // doubled subspace: convergence ratio per sweep is lambda_i / lambda_{M+1}
    const int buffer = std::max(4, m);
    const int M = std::min(m + buffer, (g.nx - 1) * g.ny + g.nx * (g.ny - 1));

    std::mt19937_64 rng(0x5eedu + 1000003u * static_cast<unsigned>(g.nx) +
                        static_cast<unsigned>(g.ny));
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    std::vector<MACVectorField> X;
    X.reserve(M);
    for (int q = 0; q < M; ++q) {
        MACVectorField v(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) v.ux(i, j) = dist(rng);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) v.uy(i, j) = dist(rng);
        leray_project(v);
        v.apply_noslip();
        X.push_back(std::move(v));
    }

    auto mgs = [&](std::vector<MACVectorField>& V) {
        for (int q = 0; q < static_cast<int>(V.size()); ++q) {
            for (int r = 0; r < q; ++r) {
                double c = inner(V[q], V[r]);
                const auto& k = kern::kernels();
                k.axpy(-c, V[r].ux_data(), V[q].ux_data(), g.xfaces());
                k.axpy(-c, V[r].uy_data(), V[q].uy_data(), g.yfaces());
            }
            double nn = std::sqrt(inner(V[q], V[q]));
            if (nn < 1e-14) throw SolverError("stokes_eigenmodes: basis collapse", nn, q);
            const auto& k = kern::kernels();
            k.scale(1.0 / nn, V[q].ux_data(), g.xfaces());
            k.scale(1.0 / nn, V[q].uy_data(), g.yfaces());
        }
    };

    // Jacobi eigensolver for the small symmetric Ritz matrix
    auto sym_eig = [](std::vector<double>& Hm, int n, std::vector<double>& V) {
        V.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) V[static_cast<std::size_t>(i) * n + i] = 1.0;
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q)
                    off += Hm[static_cast<std::size_t>(p) * n + q] *
                           Hm[static_cast<std::size_t>(p) * n + q];
            if (off < 1e-26) break;
            for (int p = 0; p < n; ++p)
                for (int q = p + 1; q < n; ++q) {
                    double apq = Hm[static_cast<std::size_t>(p) * n + q];
                    if (std::fabs(apq) < 1e-300) continue;
                    double app = Hm[static_cast<std::size_t>(p) * n + p];
                    double aqq = Hm[static_cast<std::size_t>(q) * n + q];
                    double tau = (aqq - app) / (2.0 * apq);
                    double t = (tau >= 0 ? 1.0 : -1.0) /
                               (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                    double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                    for (int r = 0; r < n; ++r) {
                        double hrp = Hm[static_cast<std::size_t>(r) * n + p];
                        double hrq = Hm[static_cast<std::size_t>(r) * n + q];
                        Hm[static_cast<std::size_t>(r) * n + p] = c * hrp - s * hrq;
                        Hm[static_cast<std::size_t>(r) * n + q] = s * hrp + c * hrq;
                    }
                    for (int r = 0; r < n; ++r) {
                        double hpr = Hm[static_cast<std::size_t>(p) * n + r];
                        double hqr = Hm[static_cast<std::size_t>(q) * n + r];
                        Hm[static_cast<std::size_t>(p) * n + r] = c * hpr - s * hqr;
                        Hm[static_cast<std::size_t>(q) * n + r] = s * hpr + c * hqr;
                    }
                    for (int r = 0; r < n; ++r) {
                        double vrp = V[static_cast<std::size_t>(r) * n + p];
                        double vrq = V[static_cast<std::size_t>(r) * n + q];
                        V[static_cast<std::size_t>(r) * n + p] = c * vrp - s * vrq;
                        V[static_cast<std::size_t>(r) * n + q] = s * vrp + c * vrq;
                    }
                }
        }
    };

    std::vector<double> lam(M, 0.0);
    const int max_sweeps = 200;
    double worst = 1.0;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        // inverse iteration step
        for (int q = 0; q < M; ++q) X[q] = solve_stokes(X[q], cfg).u;
        mgs(X);

        // Rayleigh-Ritz with H_ij = (grad x_i, grad x_j)
        std::vector<double> H(static_cast<std::size_t>(M) * M);
        for (int p = 0; p < M; ++p)
            for (int q = p; q < M; ++q) {
                double v = grad_inner(X[p], X[q]);
                H[static_cast<std::size_t>(p) * M + q] = v;
                H[static_cast<std::size_t>(q) * M + p] = v;
            }
        std::vector<double> V;
        sym_eig(H, M, V);
        for (int q = 0; q < M; ++q) lam[q] = H[static_cast<std::size_t>(q) * M + q];
        // sort ascending
        std::vector<int> order(M);
        for (int q = 0; q < M; ++q) order[q] = q;
        std::sort(order.begin(), order.end(), [&](int a, int b) { return lam[a] < lam[b]; });

        std::vector<MACVectorField> Y;
        Y.reserve(M);
        std::vector<double> lam_sorted(M);
        for (int q = 0; q < M; ++q) {
            int col = order[q];
            MACVectorField acc(g);
            const auto& k = kern::kernels();
            for (int r = 0; r < M; ++r) {
                double c = V[static_cast<std::size_t>(r) * M + col];
                k.axpy(c, X[r].ux_data(), acc.ux_data(), g.xfaces());
                k.axpy(c, X[r].uy_data(), acc.uy_data(), g.yfaces());
            }
            lam_sorted[q] = lam[col];
            Y.push_back(std::move(acc));
        }
        X = std::move(Y);
        lam = lam_sorted;

        // residual check for the requested modes: || P(-Lap w) - lambda w ||
        worst = 0.0;
        const auto& k = kern::kernels();
        for (int q = 0; q < m; ++q) {
            MACVectorField L = apply_vector_laplacian(X[q]);
            k.scale(-1.0, L.ux_data(), g.xfaces());
            k.scale(-1.0, L.uy_data(), g.yfaces());
            leray_project(L);
            k.axpy(-lam[q], X[q].ux_data(), L.ux_data(), g.xfaces());
            k.axpy(-lam[q], X[q].uy_data(), L.uy_data(), g.yfaces());
            worst = std::max(worst, std::sqrt(inner(L, L)) / lam[q]);
        }
        if (sweep >= 2 && worst <= mode_tol) break;
    }
    if (worst > mode_tol)
        throw SolverError("stokes_eigenmodes: subspace iteration did not settle", worst,
                          max_sweeps);

    StokesModes out;
    out.modes.assign(X.begin(), X.begin() + m);
    out.lambdas.assign(lam.begin(), lam.begin() + m);
    return out;
}

}  // namespace nschb
