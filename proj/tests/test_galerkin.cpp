#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "nschb/galerkin.hpp"
#include "nschb/kernels.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"

using namespace nschb;

namespace {

constexpr double kPi = 3.14159265358979323846;

const GalerkinBasis& shared_basis() {
    static GalerkinBasis b = GalerkinBasis::build(Grid(24, 24, 1.0, 1.0), 8, SolverConfig{});
    return b;
}

MACVectorField smooth_field(const Grid& g, double amp) {
    MACVectorField u(g);
    auto psi = [&](double x, double y) {
        double sx = std::sin(kPi * x / g.lx), sy = std::sin(kPi * y / g.ly);
        return amp * sx * sx * sy * sy * (1.0 + 0.3 * std::sin(2.0 * kPi * x / g.lx));
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            u.ux(i, j) = (psi(g.xf(i), g.yf(j + 1)) - psi(g.xf(i), g.yf(j))) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u.uy(i, j) = -(psi(g.xf(i + 1), g.yf(j)) - psi(g.xf(i), g.yf(j))) / g.dx;
    return u;
}

}  // namespace

TEST_CASE("basis validation and projection of a basis element") {
    const GalerkinBasis& b = shared_basis();
    b.validate();

    GalerkinProjection p = galerkin_project(b.modes[0], b);
    CHECK(p.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 1; i < b.m; ++i) CHECK(std::fabs(p.coeffs[i]) < 1e-8);
    kern::kernels().axpy(-1.0, b.modes[0].ux_data(), p.u_m.ux_data(), b.grid.xfaces());
    kern::kernels().axpy(-1.0, b.modes[0].uy_data(), p.u_m.uy_data(), b.grid.yfaces());
    CHECK(norm(p.u_m, NormKind::L2) < 1e-8);
}

TEST_CASE("projection: orthogonal remainder, idempotence, Bessel decay in m") {
    const GalerkinBasis& b = shared_basis();
    const Grid& g = b.grid;
    MACVectorField u = smooth_field(g, 0.5);
    leray_project(u);
    u.apply_noslip();

    GalerkinProjection p = galerkin_project(u, b);
    // remainder orthogonal to the span
    MACVectorField rem = u;
    kern::kernels().axpy(-1.0, p.u_m.ux_data(), rem.ux_data(), g.xfaces());
    kern::kernels().axpy(-1.0, p.u_m.uy_data(), rem.uy_data(), g.yfaces());
    for (int j = 0; j < b.m; ++j) CHECK(std::fabs(inner(rem, b.modes[j])) < 1e-10);

    // idempotence
    GalerkinProjection p2 = galerkin_project(p.u_m, b);
    for (int j = 0; j < b.m; ++j)
        CHECK(p2.coeffs[j] == doctest::Approx(p.coeffs[j]).epsilon(1e-12));

    // || u - u_m || nonincreasing in m
    double prev = 1e300;
    for (int m = 1; m <= b.m; ++m) {
        MACVectorField um(g);
        for (int i = 0; i < m; ++i) {
            kern::kernels().axpy(p.coeffs[i], b.modes[i].ux_data(), um.ux_data(), g.xfaces());
            kern::kernels().axpy(p.coeffs[i], b.modes[i].uy_data(), um.uy_data(), g.yfaces());
        }
        kern::kernels().axpy(-1.0, u.ux_data(), um.ux_data(), g.xfaces());
        kern::kernels().axpy(-1.0, u.uy_data(), um.uy_data(), g.yfaces());
        double e = norm(um, NormKind::L2);
        CHECK(e <= prev + 1e-14);
        prev = e;
    }
}

TEST_CASE("modal decay oracle: g1(t) = exp(-nu lambda1 t) g1(0) at tiny amplitude") {
    const GalerkinBasis& b = shared_basis();
    const Grid& g = b.grid;
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.nu0 = 1.0;
    m.nu1 = 0.0;
    m.finalize();
    PhysicalParams phys;
    phys.Ra = 0.0;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);

    std::vector<double> c(b.m, 0.0);
    c[0] = 1e-6;
    double dt = 1e-3;
    int steps = 200;
    for (int s = 0; s < steps; ++s) c = galerkin_ns_step(c, b, phi, th, pot, m, phys, dt);
    double expect = 1e-6 * std::exp(-m.nu0 * b.eigenvalues[0] * steps * dt);
    CHECK(c[0] == doctest::Approx(expect).epsilon(0.01));
    for (int i = 1; i < b.m; ++i) CHECK(std::fabs(c[i]) < 1e-9);
}

TEST_CASE("zero coefficients and zero forcing stay zero") {
    const GalerkinBasis& b = shared_basis();
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;
    phys.Ra = 0.0;
    ScalarField phi(b.grid, ScalarBC::HomogeneousNeumann);
    ScalarField th(b.grid, ScalarBC::HomogeneousDirichlet);
    std::vector<double> c(b.m, 0.0);
    for (int s = 0; s < 5; ++s) c = galerkin_ns_step(c, b, phi, th, pot, m, phys, 1e-3);
    for (double v : c) CHECK(v == 0.0);
}

TEST_CASE("modal kinetic energy identity with zero forcing") {
    // d/dt (1/2 sum g^2) = -(2 nu D u, D u) within time-integration error
    const GalerkinBasis& b = shared_basis();
    const Grid& g = b.grid;
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.nu0 = 0.05;
    m.nu1 = 0.0;
    m.finalize();
    PhysicalParams phys;
    phys.Ra = 0.0;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);

    std::vector<double> c(b.m, 0.0);
    for (int i = 0; i < b.m; ++i) c[i] = 0.3 / (1.0 + i);
    double dt = 2e-4;
    for (int s = 0; s < 20; ++s) {
        double e0 = 0.0;
        for (double v : c) e0 += 0.5 * v * v;
        // dissipation at the midpoint-ish state
        MACVectorField u = galerkin_assemble(c, b);
        ScalarField nu_cells(g, ScalarBC::HomogeneousNeumann, m.nu0);
        std::vector<double> nu_nodes(static_cast<std::size_t>(g.nodes()), m.nu0);
        double diss0 = 0.0;
        {
            TensorField d = sym_grad(u);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    diss0 += 2.0 * m.nu0 *
                             (d.xx(i, j) * d.xx(i, j) + d.yy(i, j) * d.yy(i, j)) *
                             g.cell_volume();
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i)
                    diss0 += 4.0 * m.nu0 * d.xy(i, j) * d.xy(i, j) * node_weight(g, i, j);
        }
        c = galerkin_ns_step(c, b, phi, th, pot, m, phys, dt);
        double e1 = 0.0;
        for (double v : c) e1 += 0.5 * v * v;
        double lhs = (e1 - e0) / dt;
        CHECK(lhs == doctest::Approx(-diss0).epsilon(0.02));
    }
}

TEST_CASE("a priori bound shape: fitted constant is refinement-stable") {
    // sup_t ||u_m||^2 + int ||grad u_m||^2 <= C (||u0||^2 + int ||grad phi||^4 + int ||theta||^2)
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;
    auto fitted = [&](int n) {
        Grid g(n, n, 1.0, 1.0);
        GalerkinBasis b = GalerkinBasis::build(g, 6, SolverConfig{});
        ScalarField phi(g, ScalarBC::HomogeneousNeumann);
        ScalarField th(g, ScalarBC::HomogeneousDirichlet);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                phi(i, j) = 0.6 * std::cos(kPi * g.xc(i)) * std::cos(kPi * g.yc(j));
                th(i, j) = 0.5 * std::sin(kPi * g.xc(i)) * std::sin(kPi * g.yc(j));
            }
        MACVectorField u0 = smooth_field(g, 0.2);
        leray_project(u0);
        std::vector<double> c = galerkin_project(u0, b).coeffs;
        double dt = 1e-3, T = 0.05;
        double sup_u = 0.0, int_grad = 0.0, int_phi4 = 0.0, int_th2 = 0.0;
        double u0n = 0.0;
        for (double v : c) u0n += v * v;
        long steps = std::llround(T / dt);
        for (long s = 0; s < steps; ++s) {
            c = galerkin_ns_step(c, b, phi, th, pot, m, phys, dt);
            MACVectorField u = galerkin_assemble(c, b);
            double un = inner(u, u);
            sup_u = std::max(sup_u, un);
            double gn = norm(u, NormKind::H1semi);
            int_grad += dt * gn * gn;
            double gp = norm(phi, NormKind::H1semi);
            int_phi4 += dt * gp * gp * gp * gp;
            double tn = norm(th, NormKind::L2);
            int_th2 += dt * tn * tn;
        }
        return (sup_u + int_grad) / (u0n + int_phi4 + int_th2);
    };
    double c24 = fitted(24), c48 = fitted(48);
    CHECK(std::fabs(c48 - c24) / c24 < 0.25);
}
