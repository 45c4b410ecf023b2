#include "nschb/poisson.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "nschb/fastdiag.hpp"
#include "nschb/kernels.hpp"
#include "nschb/krylov.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"

namespace nschb {

namespace {

struct LevelDims {
    int nx, ny;
    double dx, dy;
};

// (alpha - beta*Lap) on a raw cell array with ghost sign s (+1 Neumann, -1 Dirichlet)
void apply_raw(const LevelDims& d, double s, double alpha, double beta, const double* x,
               double* y) {
    const double cx = beta / (d.dx * d.dx), cy = beta / (d.dy * d.dy);
    const double cc = alpha + 2.0 * cx + 2.0 * cy;
    kern::kernels().stencil5(y, x, static_cast<std::size_t>(d.nx), static_cast<std::size_t>(d.ny),
                             cc, -cx, -cy);
    auto cell = [&](int i, int j) {
        const double* row = x + static_cast<std::size_t>(j) * d.nx;
        double c = row[i];
        double w = (i > 0) ? row[i - 1] : s * c;
        double e = (i < d.nx - 1) ? row[i + 1] : s * c;
        double so = (j > 0) ? x[static_cast<std::size_t>(j - 1) * d.nx + i] : s * c;
        double no = (j < d.ny - 1) ? x[static_cast<std::size_t>(j + 1) * d.nx + i] : s * c;
        y[static_cast<std::size_t>(j) * d.nx + i] =
            alpha * c + cx * (2.0 * c - w - e) + cy * (2.0 * c - so - no);
    };
    for (int i = 0; i < d.nx; ++i) {
        cell(i, 0);
        cell(i, d.ny - 1);
    }
    for (int j = 1; j < d.ny - 1; ++j) {
        cell(0, j);
        cell(d.nx - 1, j);
    }
}

double jacobi_diag(const LevelDims& d, double s, double alpha, double beta, int i, int j) {
    const double cx = beta / (d.dx * d.dx), cy = beta / (d.dy * d.dy);
    double diag = alpha + 2.0 * cx + 2.0 * cy;
    if (i == 0) diag -= s * cx;
    if (i == d.nx - 1) diag -= s * cx;
    if (j == 0) diag -= s * cy;
    if (j == d.ny - 1) diag -= s * cy;
    return diag;
}

// Geometric multigrid for the constant-coefficient operator.
class Multigrid {
  public:
    Multigrid(const Grid& g, ScalarBC bc, double alpha, double beta)
        : bc_(bc), s_(bc == ScalarBC::HomogeneousNeumann ? 1.0 : -1.0), alpha_(alpha),
          beta_(beta) {
        LevelDims d{g.nx, g.ny, g.dx, g.dy};
        dims_.push_back(d);
        while (d.nx % 2 == 0 && d.ny % 2 == 0 && d.nx > 8 && d.ny > 8) {
            d = LevelDims{d.nx / 2, d.ny / 2, d.dx * 2.0, d.dy * 2.0};
            dims_.push_back(d);
        }
        const LevelDims& c = dims_.back();
        Basis1DKind k = bc == ScalarBC::HomogeneousNeumann ? Basis1DKind::CellNeumann
                                                           : Basis1DKind::CellDirichlet;
        coarse_ = std::make_unique<FastDiag2D>(k, c.nx, c.dx, k, c.ny, c.dy);
        for (const auto& ld : dims_) {
            std::size_t n = static_cast<std::size_t>(ld.nx) * ld.ny;
            xs_.emplace_back(n, 0.0);
            bs_.emplace_back(n, 0.0);
            rs_.emplace_back(n, 0.0);
        }
    }

    // one V(2,2)-cycle on level 0: x <- x + M^{-1}(b - A x), x initialized by caller
    void vcycle(const double* b, double* x) {
        std::size_t n = static_cast<std::size_t>(dims_[0].nx) * dims_[0].ny;
        std::memcpy(bs_[0].data(), b, n * sizeof(double));
        std::memcpy(xs_[0].data(), x, n * sizeof(double));
        cycle(0);
        std::memcpy(x, xs_[0].data(), n * sizeof(double));
    }

  private:
    void smooth(std::size_t lvl, int sweeps) {
        const LevelDims& d = dims_[lvl];
        std::vector<double>& x = xs_[lvl];
        std::vector<double>& r = rs_[lvl];
        const double omega = 0.8;
        for (int sw = 0; sw < sweeps; ++sw) {
            apply_raw(d, s_, alpha_, beta_, x.data(), r.data());
            for (int j = 0; j < d.ny; ++j)
                for (int i = 0; i < d.nx; ++i) {
                    std::size_t id = static_cast<std::size_t>(j) * d.nx + i;
                    x[id] += omega * (bs_[lvl][id] - r[id]) / jacobi_diag(d, s_, alpha_, beta_, i, j);
                }
        }
    }

    void cycle(std::size_t lvl) {
        const LevelDims& d = dims_[lvl];
        if (lvl == dims_.size() - 1) {
            std::memcpy(xs_[lvl].data(), bs_[lvl].data(),
                        static_cast<std::size_t>(d.nx) * d.ny * sizeof(double));
            coarse_->solve(alpha_, beta_, xs_[lvl].data());
            return;
        }
        smooth(lvl, 2);
        apply_raw(d, s_, alpha_, beta_, xs_[lvl].data(), rs_[lvl].data());
        const LevelDims& dc = dims_[lvl + 1];
        for (int j = 0; j < dc.ny; ++j)
            for (int i = 0; i < dc.nx; ++i) {
                std::size_t i0 = static_cast<std::size_t>(2 * j) * d.nx + 2 * i;
                std::size_t i1 = i0 + 1, i2 = i0 + d.nx, i3 = i2 + 1;
                double rf0 = bs_[lvl][i0] - rs_[lvl][i0];
                double rf1 = bs_[lvl][i1] - rs_[lvl][i1];
                double rf2 = bs_[lvl][i2] - rs_[lvl][i2];
                double rf3 = bs_[lvl][i3] - rs_[lvl][i3];
                bs_[lvl + 1][static_cast<std::size_t>(j) * dc.nx + i] =
                    0.25 * (rf0 + rf1 + rf2 + rf3);
            }
        std::fill(xs_[lvl + 1].begin(), xs_[lvl + 1].end(), 0.0);
        cycle(lvl + 1);
        for (int j = 0; j < dc.ny; ++j)
            for (int i = 0; i < dc.nx; ++i) {
                double c = xs_[lvl + 1][static_cast<std::size_t>(j) * dc.nx + i];
                std::size_t i0 = static_cast<std::size_t>(2 * j) * d.nx + 2 * i;
                xs_[lvl][i0] += c;
                xs_[lvl][i0 + 1] += c;
                xs_[lvl][i0 + d.nx] += c;
                xs_[lvl][i0 + d.nx + 1] += c;
            }
        smooth(lvl, 2);
    }

    ScalarBC bc_;
    double s_, alpha_, beta_;
    std::vector<LevelDims> dims_;
    std::vector<std::vector<double>> xs_, bs_, rs_;
    std::unique_ptr<FastDiag2D> coarse_;
};

void subtract_mean(double* x, std::size_t n) {
    double m = kern::kernels().sum(x, n) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) x[i] -= m;
}

// shared driver: solve (alpha - beta*Lap) u = rhs (+ optionally variable kappa)
ScalarField solve_const(const ScalarField& rhs, double alpha, double beta,
                        const SolverConfig& cfg, bool zero_mean) {
    cfg.validate();
    const Grid& g = rhs.grid();
    const ScalarBC bc = rhs.bc();
    const double s = bc == ScalarBC::HomogeneousNeumann ? 1.0 : -1.0;
    const LevelDims d{g.nx, g.ny, g.dx, g.dy};
    const std::size_t n = rhs.size();

    ScalarField out(g, bc);
    std::vector<double> b(rhs.data(), rhs.data() + n);
    if (zero_mean) subtract_mean(b.data(), n);

    ApplyFn A = [&](const double* x, double* y) {
        apply_raw(d, s, alpha, beta, x, y);
        if (zero_mean) subtract_mean(y, n);
    };

    KrylovResult kr;
    if (cfg.method == SolverConfig::Method::ConjugateGradient) {
        const FastDiag2D& fd = cell_solver(g, bc);
        ApplyFn M = [&](const double* x, double* y) {
            std::memcpy(y, x, n * sizeof(double));
            fd.solve(alpha, beta, y);
            if (zero_mean) subtract_mean(y, n);
        };
        kr = pcg(n, A, M, b.data(), out.data(), cfg.rel_tol, cfg.max_iter);
    } else {
        Multigrid mg(g, bc, alpha, beta);
        std::vector<double> r(n);
        const auto& kn = kern::kernels();
        double bnorm = std::sqrt(kn.nrm2sq(b.data(), n));
        if (bnorm == 0.0) bnorm = 1.0;
        for (int it = 0; it < cfg.max_iter; ++it) {
            mg.vcycle(b.data(), out.data());
            if (zero_mean) subtract_mean(out.data(), n);
            apply_raw(d, s, alpha, beta, out.data(), r.data());
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
            if (zero_mean) subtract_mean(r.data(), n);
            kr.iters = it + 1;
            kr.rel_residual = std::sqrt(kn.nrm2sq(r.data(), n)) / bnorm;
            if (kr.rel_residual <= cfg.rel_tol) {
                kr.converged = true;
                break;
            }
        }
    }
    if (!kr.converged)
        throw SolverError("elliptic solve did not converge", kr.rel_residual, kr.iters);
    if (zero_mean) subtract_mean(out.data(), n);
    return out;
}

}  // namespace

void apply_helmholtz(const ScalarField& x, double alpha, double beta, ScalarField& y) {
    const Grid& g = x.grid();
    const double s = x.bc() == ScalarBC::HomogeneousNeumann ? 1.0 : -1.0;
    apply_raw(LevelDims{g.nx, g.ny, g.dx, g.dy}, s, alpha, beta, x.data(), y.data());
}

ScalarField solve_neumann_poisson(const ScalarField& g, const SolverConfig& cfg) {
    if (g.bc() != ScalarBC::HomogeneousNeumann)
        throw std::invalid_argument("solve_neumann_poisson: rhs must carry Neumann bc");
    const std::size_t n = g.size();
    double m = kern::kernels().sum(g.data(), n) / static_cast<double>(n);
    double rms = std::sqrt(kern::kernels().nrm2sq(g.data(), n) / static_cast<double>(n));
    if (std::fabs(m) > 1e-10 * rms + 1e-300)
        throw CompatibilityError("solve_neumann_poisson: rhs mean violates compatibility");
    return solve_const(g, 0.0, 1.0, cfg, /*zero_mean=*/true);
}

ScalarField solve_helmholtz(const ScalarField& rhs, double alpha, double beta,
                            const SolverConfig& cfg) {
    bool singular = alpha == 0.0 && rhs.bc() == ScalarBC::HomogeneousNeumann;
    return solve_const(rhs, alpha, beta, cfg, singular);
}

ScalarField solve_var_diffusion(const ScalarField& rhs, double alpha, const ScalarField& kappa,
                                const SolverConfig& cfg) {
    cfg.validate();
    const Grid& g = rhs.grid();
    const std::size_t n = rhs.size();
    ScalarField out(g, rhs.bc());

    double kbar = mean(kappa);

    ScalarField xf(g, rhs.bc()), yf(g, rhs.bc());
    ApplyFn A = [&](const double* x, double* y) {
        std::memcpy(xf.data(), x, n * sizeof(double));
        ScalarField diff = kappa_diffusion(xf, kappa);
        for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i] - diff.data()[i];
    };

    ApplyFn M;
    std::unique_ptr<Multigrid> mg;
    if (cfg.method == SolverConfig::Method::ConjugateGradient) {
        const FastDiag2D& fd = cell_solver(g, rhs.bc());
        M = [&fd, kbar, alpha, n](const double* x, double* y) {
            std::memcpy(y, x, n * sizeof(double));
            fd.solve(alpha, kbar, y);
        };
    } else {
        mg = std::make_unique<Multigrid>(g, rhs.bc(), alpha, kbar);
        M = [&mg, n](const double* x, double* y) {
            std::memset(y, 0, n * sizeof(double));
            mg->vcycle(x, y);
        };
    }

    KrylovResult kr = pcg(n, A, M, rhs.data(), out.data(), cfg.rel_tol, cfg.max_iter);
    if (!kr.converged)
        throw SolverError("variable-coefficient solve did not converge", kr.rel_residual,
                          kr.iters);
    return out;
}

void leray_project(MACVectorField& u, ScalarField* p_out, double p_scale) {
    const Grid& g = u.grid();
    ScalarField d = div(u);
    const FastDiag2D& fd = cell_solver(g, ScalarBC::HomogeneousNeumann);
    // Lap psi = div u  <=>  (0 - (-1)*Lap)... solve (0 + Lap)psi: use beta = -1
    fd.solve(0.0, -1.0, d.data());
    // d now holds psi with mean zero
    ScalarField& psi = d;
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            u.ux(i, j) -= (psi(i, j) - psi(i - 1, j)) * idx;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u.uy(i, j) -= (psi(i, j) - psi(i, j - 1)) * idy;
    if (p_out) {
        *p_out = psi;
        kern::kernels().scale(p_scale, p_out->data(), p_out->size());
    }
}

}  // namespace nschb
