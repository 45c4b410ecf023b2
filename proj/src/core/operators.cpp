#include "nschb/operators.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "nschb/kernels.hpp"

namespace nschb {

MACVectorField grad(const ScalarField& f) {
    const Grid& g = f.grid();
    MACVectorField out(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            out.ux(i, j) = (f.at(i, j) - f.at(i - 1, j)) * idx;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.uy(i, j) = (f.at(i, j) - f.at(i, j - 1)) * idy;
    return out;
}

ScalarField div(const MACVectorField& v) {
    const Grid& g = v.grid();
    ScalarField out(g, ScalarBC::HomogeneousNeumann);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) * idx + (v.uy(i, j + 1) - v.uy(i, j)) * idy;
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(g, f.bc());
    const double cx = 1.0 / (g.dx * g.dx), cy = 1.0 / (g.dy * g.dy);
    const double cc = -2.0 * (cx + cy);
    kern::kernels().stencil5(out.data(), f.data(), static_cast<std::size_t>(g.nx),
                             static_cast<std::size_t>(g.ny), cc, cx, cy);
    auto edge = [&](int i, int j) {
        out(i, j) = cx * (f.at(i - 1, j) - 2.0 * f(i, j) + f.at(i + 1, j)) +
                    cy * (f.at(i, j - 1) - 2.0 * f(i, j) + f.at(i, j + 1));
    };
    for (int i = 0; i < g.nx; ++i) {
        edge(i, 0);
        edge(i, g.ny - 1);
    }
    for (int j = 1; j < g.ny - 1; ++j) {
        edge(0, j);
        edge(g.nx - 1, j);
    }
    return out;
}

ScalarField advect(const ScalarField& f, const MACVectorField& v, ConvectionScheme scheme) {
    const Grid& g = f.grid();

    static std::atomic<bool> warned{false};
    {
        ScalarField d = div(v);
        double dmax = kern::kernels().max_abs(d.data(), d.size());
        double vmax = std::max(kern::kernels().max_abs(v.ux_data(), g.xfaces()),
                               kern::kernels().max_abs(v.uy_data(), g.yfaces()));
        if (dmax > 1e-8 * (1.0 + vmax / g.dx) && !warned.exchange(true))
            std::fprintf(stderr,
                         "nschb: advect called with non-solenoidal velocity (max|div v| = %.3e)\n",
                         dmax);
    }

    const bool up = scheme == ConvectionScheme::Upwind;
    ScalarField out(g, f.bc());
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    // x-fluxes at x-faces, y-fluxes at y-faces; boundary faces carry u = 0.
    std::vector<double> fx(static_cast<std::size_t>(g.xfaces()), 0.0);
    std::vector<double> fy(static_cast<std::size_t>(g.yfaces()), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double u = v.ux(i, j);
            double fv = up ? (u >= 0.0 ? f(i - 1, j) : f(i, j)) : 0.5 * (f(i - 1, j) + f(i, j));
            fx[g.uxidx(i, j)] = u * fv;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double u = v.uy(i, j);
            double fv = up ? (u >= 0.0 ? f(i, j - 1) : f(i, j)) : 0.5 * (f(i, j - 1) + f(i, j));
            fy[g.uyidx(i, j)] = u * fv;
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = -((fx[g.uxidx(i + 1, j)] - fx[g.uxidx(i, j)]) * idx +
                          (fy[g.uyidx(i, j + 1)] - fy[g.uyidx(i, j)]) * idy);
    return out;
}

TensorField sym_grad(const MACVectorField& v) {
    const Grid& g = v.grid();
    TensorField t(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            t.xx(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) * idx;
            t.yy(i, j) = (v.uy(i, j + 1) - v.uy(i, j)) * idy;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double dyux = (v.ux_at(i, j) - v.ux_at(i, j - 1)) * idy;
            double dxuy = (v.uy_at(i, j) - v.uy_at(i - 1, j)) * idx;
            double s = 0.5 * (dyux + dxuy);
            t.xy(i, j) = s;
            t.yx(i, j) = s;
        }
    return t;
}

TensorField grad_tensor(const MACVectorField& v) {
    const Grid& g = v.grid();
    TensorField t(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            t.xx(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) * idx;
            t.yy(i, j) = (v.uy(i, j + 1) - v.uy(i, j)) * idy;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            t.xy(i, j) = (v.ux_at(i, j) - v.ux_at(i, j - 1)) * idy;
            t.yx(i, j) = (v.uy_at(i, j) - v.uy_at(i - 1, j)) * idx;
        }
    return t;
}

MACVectorField momentum_advection(const MACVectorField& u) {
    const Grid& g = u.grid();
    MACVectorField out(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;

    // x-momentum on interior x-faces
    auto uc = [&](int i, int j) { return 0.5 * (u.ux(i, j) + u.ux(i + 1, j)); };  // cell
    auto uyn = [&](int i, int j) { return 0.5 * (u.uy_at(i - 1, j) + u.uy_at(i, j)); };  // node
    auto uxn = [&](int i, int j) { return 0.5 * (u.ux_at(i, j - 1) + u.ux_at(i, j)); };  // node
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            double dc = (uc(i, j) * uc(i, j) - uc(i - 1, j) * uc(i - 1, j)) * idx +
                        (uyn(i, j + 1) * uxn(i, j + 1) - uyn(i, j) * uxn(i, j)) * idy;
            double al = uc(i - 1, j) * (u.ux(i, j) - u.ux(i - 1, j)) * idx;
            double ar = uc(i, j) * (u.ux(i + 1, j) - u.ux(i, j)) * idx;
            double ab = uyn(i, j) * (u.ux_at(i, j) - u.ux_at(i, j - 1)) * idy;
            double at = uyn(i, j + 1) * (u.ux_at(i, j + 1) - u.ux_at(i, j)) * idy;
            double da = 0.5 * (al + ar) + 0.5 * (ab + at);
            out.ux(i, j) = 0.5 * (dc + da);
        }

    // y-momentum on interior y-faces
    auto vc = [&](int i, int j) { return 0.5 * (u.uy(i, j) + u.uy(i, j + 1)); };  // cell
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double dc = (vc(i, j) * vc(i, j) - vc(i, j - 1) * vc(i, j - 1)) * idy +
                        (uxn(i + 1, j) * uyn(i + 1, j) - uxn(i, j) * uyn(i, j)) * idx;
            double ab = vc(i, j - 1) * (u.uy(i, j) - u.uy(i, j - 1)) * idy;
            double at = vc(i, j) * (u.uy(i, j + 1) - u.uy(i, j)) * idy;
            double al = uxn(i, j) * (u.uy_at(i, j) - u.uy_at(i - 1, j)) * idx;
            double ar = uxn(i + 1, j) * (u.uy_at(i + 1, j) - u.uy_at(i, j)) * idx;
            double da = 0.5 * (ab + at) + 0.5 * (al + ar);
            out.uy(i, j) = 0.5 * (dc + da);
        }
    return out;
}

std::vector<double> cell_to_node(const ScalarField& f) {
    const Grid& g = f.grid();
    std::vector<double> n(static_cast<std::size_t>(g.nodes()));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            n[g.nidx(i, j)] =
                0.25 * (f.at(i - 1, j - 1) + f.at(i, j - 1) + f.at(i - 1, j) + f.at(i, j));
    return n;
}

double node_weight(const Grid& g, int i, int j) {
    double w = g.cell_volume();
    if (i == 0 || i == g.nx) w *= 0.5;
    if (j == 0 || j == g.ny) w *= 0.5;
    return w;
}

MACVectorField viscous_divergence(const MACVectorField& u, const ScalarField& nu_cells,
                                  const std::vector<double>& nu_nodes) {
    const Grid& g = u.grid();
    MACVectorField out(g);
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;

    // txx, tyy at cells; txy at nodes
    std::vector<double> txx(static_cast<std::size_t>(g.cells()));
    std::vector<double> tyy(static_cast<std::size_t>(g.cells()));
    std::vector<double> txy(static_cast<std::size_t>(g.nodes()));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            txx[g.cidx(i, j)] = 2.0 * nu_cells(i, j) * (u.ux(i + 1, j) - u.ux(i, j)) * idx;
            tyy[g.cidx(i, j)] = 2.0 * nu_cells(i, j) * (u.uy(i, j + 1) - u.uy(i, j)) * idy;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double dyux = (u.ux_at(i, j) - u.ux_at(i, j - 1)) * idy;
            double dxuy = (u.uy_at(i, j) - u.uy_at(i - 1, j)) * idx;
            txy[g.nidx(i, j)] = nu_nodes[g.nidx(i, j)] * (dyux + dxuy);
        }

    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.ux(i, j) = (txx[g.cidx(i, j)] - txx[g.cidx(i - 1, j)]) * idx +
                           (txy[g.nidx(i, j + 1)] - txy[g.nidx(i, j)]) * idy;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out.uy(i, j) = (txy[g.nidx(i + 1, j)] - txy[g.nidx(i, j)]) * idx +
                           (tyy[g.cidx(i, j)] - tyy[g.cidx(i, j - 1)]) * idy;
    return out;
}

ScalarField kappa_diffusion(const ScalarField& theta, const ScalarField& kappa) {
    const Grid& g = theta.grid();
    ScalarField out(g, theta.bc());
    const double idx = 1.0 / g.dx, idy = 1.0 / g.dy;
    std::vector<double> fx(static_cast<std::size_t>(g.xfaces()));
    std::vector<double> fy(static_cast<std::size_t>(g.yfaces()));
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            double kf = 0.5 * (kappa.at(i - 1, j) + kappa.at(i, j));
            fx[g.uxidx(i, j)] = kf * (theta.at(i, j) - theta.at(i - 1, j)) * idx;
        }
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double kf = 0.5 * (kappa.at(i, j - 1) + kappa.at(i, j));
            fy[g.uyidx(i, j)] = kf * (theta.at(i, j) - theta.at(i, j - 1)) * idy;
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            out(i, j) = (fx[g.uxidx(i + 1, j)] - fx[g.uxidx(i, j)]) * idx +
                        (fy[g.uyidx(i, j + 1)] - fy[g.uyidx(i, j)]) * idy;
    return out;
}

}  // namespace nschb
