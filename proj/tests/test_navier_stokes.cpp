#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nschb/kernels.hpp"
#include "nschb/navier_stokes.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"
#include "nschb/stokes.hpp"

using namespace nschb;

namespace {

constexpr double kPi = 3.14159265358979323846;

MACVectorField streamfunction_field(const Grid& g, double amp) {
    // u = curl(psi), psi = amp sin^2(pi x / lx) sin^2(pi y / ly): no-slip, exactly solenoidal
    MACVectorField u(g);
    auto psi = [&](double x, double y) {
        double sx = std::sin(kPi * x / g.lx), sy = std::sin(kPi * y / g.ly);
        return amp * sx * sx * sy * sy;
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            u.ux(i, j) = (psi(g.xf(i), g.yf(j + 1)) - psi(g.xf(i), g.yf(j))) / g.dy;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            u.uy(i, j) = -(psi(g.xf(i + 1), g.yf(j)) - psi(g.xf(i), g.yf(j))) / g.dx;
    u.apply_noslip();
    return u;
}

}  // namespace

TEST_CASE("rest state is preserved") {
    Grid g(32, 32, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;  // Ga = 0
    NSStepConfig cfg;
    cfg.dt = 1e-3;
    MACVectorField u(g);
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    for (int s = 0; s < 5; ++s) {
        NSStepResult r = ns_step(u, phi, th, phys, m, pot, cfg);
        u = r.u;
    }
    CHECK(norm(u, NormKind::Linf) < 1e-13);
}

TEST_CASE("curl-free buoyancy is absorbed into pressure") {
    // theta = theta(y) only, phi constant: (Ra theta(y) - Ga) g e2 is a
    // gradient, so the projected velocity stays at solver tolerance
    Grid g(48, 48, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;
    phys.Ra = 3.0;
    phys.Ga = 0.5;
    NSStepConfig cfg;
    cfg.dt = 2e-5;  // explicit diffusion: stay under the diffusive CFL
    cfg.viscous = NSStepConfig::ViscousTreatment::Explicit;
    MACVectorField u(g);
    ScalarField phi(g, ScalarBC::HomogeneousNeumann, 0.2);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) th(i, j) = std::sin(kPi * g.yc(j));
    for (int s = 0; s < 10; ++s) u = ns_step(u, phi, th, phys, m, pot, cfg).u;
    CHECK(norm(u, NormKind::L2) < 1e-11);
}

TEST_CASE("capillary force: constant phi and theta give zero force") {
    Grid g(32, 32, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    ScalarField phi(g, ScalarBC::HomogeneousNeumann, 0.3);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);  // zero
    MACVectorField f = capillary_force(phi, th, pot, m);
    // interior faces only (walls excluded by construction)
    CHECK(norm(f, NormKind::Linf) < 1e-13);
}

TEST_CASE("capillary force is linear in lambda0 and affine in b") {
    Grid g(32, 32, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            phi(i, j) = 0.8 * std::tanh((g.yc(j) - 0.5) / 0.1);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) th(i, j) = std::sin(kPi * g.xc(i)) * std::sin(kPi * g.yc(j));

    CoefficientModel m1;
    m1.b = 0.25;
    m1.finalize();
    CoefficientModel m2 = m1;
    m2.lambda0 = 2.0;
    m2.finalize();
    MACVectorField f1 = capillary_force(phi, th, pot, m1);
    MACVectorField f2 = capillary_force(phi, th, pot, m2);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            CHECK(f2.ux(i, j) == doctest::Approx(2.0 * f1.ux(i, j)).epsilon(1e-12));

    // doubling b doubles the lambda'-part: f(b) - f(0) is linear in b
    CoefficientModel m0 = m1;
    m0.b = 0.0;
    m0.finalize();
    CoefficientModel mb2 = m1;
    mb2.b = 0.5;
    mb2.finalize();
    MACVectorField f0 = capillary_force(phi, th, pot, m0);
    MACVectorField fb = capillary_force(phi, th, pot, m1);
    MACVectorField fb2 = capillary_force(phi, th, pot, mb2);
    double worst = 0.0;
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d1 = fb.uy(i, j) - f0.uy(i, j);
            double d2 = fb2.uy(i, j) - f0.uy(i, j);
            worst = std::max(worst, std::fabs(d2 - 2.0 * d1));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("constant-lambda capillary force matches the mu grad(phi) form after projection") {
    // with b = 0: -div(sigma) = lambda0 (mu grad phi - grad(2W + |grad phi|^2)),
    // so the Leray projections of the two forms agree to O(h^2)
    PotentialParams pot(1.0, 2.0);
    double prev = 0.0;
    for (int lev = 0; lev < 3; ++lev) {
        int n = 32 << lev;
        Grid g(n, n, 1.0, 1.0);
        CoefficientModel m;
        m.b = 0.0;
        m.a = 1.0;
        m.lambda0 = 1.0;
        m.finalize();
        ScalarField phi(g, ScalarBC::HomogeneousNeumann);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                phi(i, j) = 0.7 * std::cos(kPi * g.xc(i)) * std::cos(kPi * g.yc(j));
        ScalarField th(g, ScalarBC::HomogeneousDirichlet);

        MACVectorField f = capillary_force(phi, th, pot, m);
        f.apply_noslip();
        leray_project(f);

        // mu grad(phi) with mu = -Lap phi + W'(phi)
        ScalarField mu = laplacian(phi);
        for (std::size_t q = 0; q < mu.size(); ++q)
            mu.data()[q] = -mu.data()[q] +
                           eval_potential(pot, phi.data()[q], PotentialPart::Wp);
        MACVectorField gp = grad(phi);
        MACVectorField mg(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                mg.ux(i, j) = 0.5 * (mu(i - 1, j) + mu(i, j)) * gp.ux(i, j);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                mg.uy(i, j) = 0.5 * (mu(i, j - 1) + mu(i, j)) * gp.uy(i, j);
        leray_project(mg);

        kern::kernels().axpy(-1.0, mg.ux_data(), f.ux_data(), g.xfaces());
        kern::kernels().axpy(-1.0, mg.uy_data(), f.uy_data(), g.yfaces());
        double err = norm(f, NormKind::L2);
        if (lev > 0) CHECK(prev / err > 3.0);  // ~O(h^2)
        prev = err;
    }
}

TEST_CASE("unforced viscous decay: kinetic energy strictly decreases") {
    Grid g(48, 48, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.nu0 = 0.1;
    m.nu1 = 0.0;
    m.finalize();
    PhysicalParams phys;
    phys.Ra = 0.0;
    NSStepConfig cfg;
    cfg.dt = 1e-3;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    MACVectorField u = streamfunction_field(g, 0.5);
    double ke_prev = 0.5 * inner(u, u);
    for (int s = 0; s < 100; ++s) {
        u = ns_step(u, phi, th, phys, m, pot, cfg).u;
        double ke = 0.5 * inner(u, u);
        CHECK(ke < ke_prev);
        ke_prev = ke;
    }
}

TEST_CASE("projection step: divergence-free, no-slip, pressure gauge") {
    Grid g(32, 32, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;
    NSStepConfig cfg;
    cfg.dt = 2e-3;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            phi(i, j) = 0.5 * std::cos(kPi * g.xc(i)) * std::cos(kPi * g.yc(j));
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            th(i, j) = 0.4 * std::sin(kPi * g.xc(i)) * std::sin(kPi * g.yc(j));
    MACVectorField u = streamfunction_field(g, 0.2);
    for (int s = 0; s < 10; ++s) {
        NSStepResult r = ns_step(u, phi, th, phys, m, pot, cfg);
        u = r.u;
        CHECK(norm(div(u), NormKind::Linf) < 1e-11);
        for (int j = 0; j < g.ny; ++j) {
            CHECK(u.ux(0, j) == 0.0);
            CHECK(u.ux(g.nx, j) == 0.0);
        }
        CHECK(std::fabs(mean(r.p)) < 1e-12);
    }
}

TEST_CASE("skew advection is kinetic-energy neutral") {
    Grid g(40, 40, 1.0, 1.0);
    for (unsigned seed = 0; seed < 4; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        MACVectorField u(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) u.ux(i, j) = d(rng);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) u.uy(i, j) = d(rng);
        leray_project(u);
        u.apply_noslip();
        MACVectorField adv = momentum_advection(u);
        double e = inner(adv, u);
        double scale = norm(u, NormKind::L2) * norm(adv, NormKind::L2) + 1e-30;
        CHECK(std::fabs(e) / scale < 1e-12);
    }
}

TEST_CASE("explicit viscous treatment matches semi-implicit as dt -> 0") {
    Grid g(32, 32, 1.0, 1.0);
    PotentialParams pot(1.0, 2.0);
    CoefficientModel m;
    m.finalize();
    PhysicalParams phys;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);
    MACVectorField u = streamfunction_field(g, 0.3);
    NSStepConfig ci, ce;
    ci.dt = ce.dt = 1e-5;
    ce.viscous = NSStepConfig::ViscousTreatment::Explicit;
    MACVectorField ui = ns_step(u, phi, th, phys, m, pot, ci).u;
    MACVectorField ue = ns_step(u, phi, th, phys, m, pot, ce).u;
    kern::kernels().axpy(-1.0, ue.ux_data(), ui.ux_data(), g.xfaces());
    kern::kernels().axpy(-1.0, ue.uy_data(), ui.uy_data(), g.yfaces());
    CHECK(norm(ui, NormKind::L2) < 1e-6);
}

TEST_CASE("stokes eigendecay through the projection scheme") {
    // u0 = w1, advection negligible at tiny amplitude, constant nu:
    // ||u(t)|| ~ ||u0|| exp(-nu lambda1 t) within 2% over t in [0, 1/(nu lambda1)]
    Grid g(48, 48, 1.0, 1.0);
    SolverConfig scfg;
    StokesModes em = stokes_eigenmodes(g, 1, scfg);
    const double lam1 = em.lambdas[0];
    CoefficientModel m;
    m.nu0 = 0.1;
    m.nu1 = 0.0;
    m.finalize();
    PotentialParams pot(1.0, 2.0);
    PhysicalParams phys;
    phys.Ra = 0.0;
    NSStepConfig cfg;
    cfg.dt = 5e-4;
    ScalarField phi(g, ScalarBC::HomogeneousNeumann);
    ScalarField th(g, ScalarBC::HomogeneousDirichlet);

    MACVectorField u = em.modes[0];
    kern::kernels().scale(1e-6, u.ux_data(), g.xfaces());
    kern::kernels().scale(1e-6, u.uy_data(), g.yfaces());
    const double u0 = norm(u, NormKind::L2);
    const double T = 1.0 / (m.nu0 * lam1);
    const int steps = static_cast<int>(T / cfg.dt);
    for (int s = 0; s < steps; ++s) u = ns_step(u, phi, th, phys, m, pot, cfg).u;
    double expect = u0 * std::exp(-m.nu0 * lam1 * (steps * cfg.dt));
    CHECK(norm(u, NormKind::L2) == doctest::Approx(expect).epsilon(0.02));
}
