#include "nschb/galerkin.hpp"

#include <cmath>
#include <stdexcept>

#include "nschb/kernels.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/stokes.hpp"

namespace nschb {

GalerkinBasis GalerkinBasis::build(const Grid& g, int m, const SolverConfig& cfg,
                                   double mode_tol) {
    StokesModes em = stokes_eigenmodes(g, m, cfg, 64, mode_tol);
    GalerkinBasis b;
    b.grid = g;
    b.m = m;
    b.modes = std::move(em.modes);
    b.eigenvalues = std::move(em.lambdas);
    b.validate();
    return b;
}

void GalerkinBasis::validate() const {
    for (int i = 0; i < m; ++i) {
        if (!(eigenvalues[i] > 0.0))
            throw std::invalid_argument("GalerkinBasis: eigenvalues must be positive");
        if (i > 0 && eigenvalues[i] < eigenvalues[i - 1] - 1e-10 * eigenvalues[i])
            throw std::invalid_argument("GalerkinBasis: eigenvalues must ascend");
        for (int j = 0; j <= i; ++j) {
            double ip = inner(modes[i], modes[j]);
            if (std::fabs(ip - (i == j ? 1.0 : 0.0)) > 1e-8)
                throw std::invalid_argument("GalerkinBasis: Gram matrix deviates from identity");
        }
        if (norm(div(modes[i]), NormKind::L2) > 1e-6)
            throw std::invalid_argument("GalerkinBasis: mode is not solenoidal");
    }
}

GalerkinProjection galerkin_project(const MACVectorField& u, const GalerkinBasis& basis) {
    const Grid& g = basis.grid;
    GalerkinProjection p;
    p.coeffs.resize(basis.m);
    p.u_m = MACVectorField(g);
    const auto& k = kern::kernels();
    for (int i = 0; i < basis.m; ++i) {
        p.coeffs[i] = inner(u, basis.modes[i]);
        k.axpy(p.coeffs[i], basis.modes[i].ux_data(), p.u_m.ux_data(), g.xfaces());
        k.axpy(p.coeffs[i], basis.modes[i].uy_data(), p.u_m.uy_data(), g.yfaces());
    }
    return p;
}

MACVectorField galerkin_assemble(const std::vector<double>& coeffs, const GalerkinBasis& basis) {
    const Grid& g = basis.grid;
    MACVectorField u(g);
    const auto& k = kern::kernels();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        k.axpy(coeffs[i], basis.modes[i].ux_data(), u.ux_data(), g.xfaces());
        k.axpy(coeffs[i], basis.modes[i].uy_data(), u.uy_data(), g.yfaces());
    }
    return u;
}

namespace {

// 2 (nu D(u), D(w)) with the cell/node quadrature of the implicit operator
double visc_bilinear(const MACVectorField& u, const MACVectorField& w,
                     const ScalarField& nu_cells, const std::vector<double>& nu_nodes) {
    const Grid& g = u.grid();
    TensorField du = sym_grad(u), dw = sym_grad(w);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += 2.0 * nu_cells(i, j) *
                 (du.xx(i, j) * dw.xx(i, j) + du.yy(i, j) * dw.yy(i, j)) * g.cell_volume();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            s += 4.0 * nu_nodes[g.nidx(i, j)] * du.xy(i, j) * dw.xy(i, j) *
                 node_weight(g, i, j);
    return s;
}

struct ModalForcing {
    // precomputed capillary tensor lambda(theta) grad phi x grad phi
    std::vector<double> txx, tyy, txy;
    std::vector<double> buoy_face;  // Ra g theta at interior y-faces
    ScalarField nu_cells;
    std::vector<double> nu_nodes;
};

ModalForcing assemble_forcing(const ScalarField& phi, const ScalarField& theta,
                              const CoefficientModel& m, const PhysicalParams& phys) {
    const Grid& g = phi.grid();
    ModalForcing f;
    f.txx.resize(g.cells());
    f.tyy.resize(g.cells());
    f.txy.resize(g.nodes());
    f.buoy_face.assign(g.yfaces(), 0.0);
    f.nu_cells = ScalarField(g, ScalarBC::HomogeneousNeumann);
    std::vector<double> theta_node = cell_to_node(theta);
    f.nu_nodes.resize(theta_node.size());
    for (std::size_t i = 0; i < f.nu_nodes.size(); ++i) f.nu_nodes[i] = m.nu(theta_node[i]);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f.nu_cells(i, j) = m.nu(theta(i, j));

    MACVectorField gp = grad(phi);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gx = 0.5 * (gp.ux(i, j) + gp.ux(i + 1, j));
            double gy = 0.5 * (gp.uy(i, j) + gp.uy(i, j + 1));
            double lam = m.lambda(theta(i, j));
            f.txx[g.cidx(i, j)] = lam * gx * gx;
            f.tyy[g.cidx(i, j)] = lam * gy * gy;
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
            f.txy[g.nidx(i, j)] =
                m.lambda(theta_node[g.nidx(i, j)]) * gx_node(i, j) * gy_node(i, j);

    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            f.buoy_face[g.uyidx(i, j)] =
                phys.Ra * phys.g * 0.5 * (theta(i, j - 1) + theta(i, j));
    return f;
}

// (T, grad w) + (buoy, w_y) for one mode
double forcing_dot(const ModalForcing& f, const MACVectorField& w) {
    const Grid& g = w.grid();
    TensorField tw = grad_tensor(w);
    double s = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += (f.txx[g.cidx(i, j)] * tw.xx(i, j) + f.tyy[g.cidx(i, j)] * tw.yy(i, j)) *
                 g.cell_volume();
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            s += f.txy[g.nidx(i, j)] * (tw.xy(i, j) + tw.yx(i, j)) * node_weight(g, i, j);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            s += f.buoy_face[g.uyidx(i, j)] * w.uy(i, j) * g.cell_volume();
    return s;
}

std::vector<double> modal_rhs(const std::vector<double>& coeffs, const GalerkinBasis& basis,
                              const ModalForcing& f) {
    MACVectorField u = galerkin_assemble(coeffs, basis);
    MACVectorField adv = momentum_advection(u);
    std::vector<double> out(coeffs.size());
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
        const MACVectorField& w = basis.modes[j];
        out[j] = -inner(adv, w) - visc_bilinear(u, w, f.nu_cells, f.nu_nodes) + forcing_dot(f, w);
        if (!std::isfinite(out[j]))
            throw std::overflow_error("galerkin_ns_step: modal system overflow");
    }
    return out;
}

}  // namespace

std::vector<double> galerkin_ns_step(const std::vector<double>& coeffs,
                                     const GalerkinBasis& basis, const ScalarField& phi,
                                     const ScalarField& theta, const PotentialParams& pot,
                                     const CoefficientModel& m, const PhysicalParams& phys,
                                     double dt) {
    pot.validate();
    if (static_cast<int>(coeffs.size()) != basis.m)
        throw std::invalid_argument("galerkin_ns_step: coefficient count mismatch");
    ModalForcing f = assemble_forcing(phi, theta, m, phys);

    // Heun
    std::vector<double> k1 = modal_rhs(coeffs, basis, f);
    std::vector<double> mid(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) mid[i] = coeffs[i] + dt * k1[i];
    std::vector<double> k2 = modal_rhs(mid, basis, f);
    std::vector<double> out(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        out[i] = coeffs[i] + 0.5 * dt * (k1[i] + k2[i]);
    return out;
}

}  // namespace nschb
