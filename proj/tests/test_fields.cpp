#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "nschb/fields.hpp"
#include "nschb/kernels.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"

using namespace nschb;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField fill(const Grid& g, ScalarBC bc, double (*f)(double, double)) {
    ScalarField out(g, bc);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) out(i, j) = f(g.xc(i), g.yc(j));
    return out;
}

MACVectorField random_noslip(const Grid& g, unsigned seed, int smooth_sweeps = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MACVectorField u(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) u.ux(i, j) = d(rng);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) u.uy(i, j) = d(rng);
    for (int s = 0; s < smooth_sweeps; ++s) {
        MACVectorField v = u;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                u.ux(i, j) = 0.25 * (v.ux(i - 1, j) + v.ux(i + 1, j) + v.ux_at(i, j - 1) +
                                     v.ux_at(i, j + 1));
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                u.uy(i, j) = 0.25 * (v.uy_at(i - 1, j) + v.uy_at(i + 1, j) + v.uy(i, j - 1) +
                                     v.uy(i, j + 1));
    }
    u.apply_noslip();
    return u;
}

ScalarField random_field(const Grid& g, ScalarBC bc, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    ScalarField f(g, bc);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = d(rng);
    return f;
}

}  // namespace

TEST_CASE("grad: constants and linear fields") {
    Grid g(32, 32, 1.0, 1.0);
    ScalarField c(g, ScalarBC::HomogeneousNeumann, 3.5);
    MACVectorField gc = grad(c);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) CHECK(gc.ux(i, j) == 0.0);

    ScalarField lin = fill(g, ScalarBC::HomogeneousNeumann, [](double x, double) { return x; });
    MACVectorField gl = grad(lin);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) CHECK(gl.ux(i, j) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("grad: second-order accuracy against analytic derivative") {
    // f = cos(pi x): interior max error should drop ~4x per refinement
    double prev = 0.0;
    for (int lev = 0; lev < 3; ++lev) {
        int n = 32 << lev;
        Grid g(n, 8, 1.0, 0.25);
        ScalarField f = fill(g, ScalarBC::HomogeneousNeumann,
                             [](double x, double) { return std::cos(kPi * x); });
        MACVectorField gf = grad(f);
        double err = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                err = std::max(err, std::fabs(gf.ux(i, j) + kPi * std::sin(kPi * g.xf(i))));
        if (lev > 0) CHECK(prev / err > 3.6);
        prev = err;
    }
}

TEST_CASE("summation by parts: <grad f, v> = -<f, div v> to rounding") {
    Grid g(24, 40, 1.3, 0.7);
    for (unsigned seed : {0u, 1u, 2u}) {
        ScalarField f = random_field(g, ScalarBC::HomogeneousNeumann, seed);
        MACVectorField v = random_noslip(g, seed + 10, 0);
        double lhs = inner(grad(f), v);
        double rhs = -inner(f, div(v));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("laplacian equals div(grad(f)) exactly") {
    Grid g(16, 12, 1.0, 2.0);
    for (ScalarBC bc : {ScalarBC::HomogeneousNeumann, ScalarBC::HomogeneousDirichlet}) {
        ScalarField f = random_field(g, bc, 5);
        ScalarField a = laplacian(f);
        ScalarField b = div(grad(f));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-13));
    }
}

TEST_CASE("laplacian eigenfunction oracles") {
    // Neumann: -Lap cos(pi x) = pi^2 cos(pi x); Dirichlet: -Lap sin sin = 2 pi^2 ...
    Grid g(64, 64, 1.0, 1.0);
    ScalarField fn = fill(g, ScalarBC::HomogeneousNeumann,
                          [](double x, double) { return std::cos(kPi * x); });
    ScalarField ln = laplacian(fn);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            err = std::max(err, std::fabs(ln(i, j) + kPi * kPi * std::cos(kPi * g.xc(i))));
    CHECK(err < 2.5 * kPi * kPi * kPi * kPi / (12.0 * 64.0 * 64.0) * 2.0);

    ScalarField fd = fill(g, ScalarBC::HomogeneousDirichlet,
                          [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    ScalarField ld = laplacian(fd);
    err = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            err = std::max(err, std::fabs(ld(i, j) + 2.0 * kPi * kPi * fd(i, j)));
    CHECK(err < 1e-2);
}

TEST_CASE("advect: zero velocity, constant field, conservation") {
    Grid g(32, 32, 1.0, 1.0);
    ScalarField f = random_field(g, ScalarBC::HomogeneousNeumann, 3);
    MACVectorField zero(g);
    ScalarField t0 = advect(f, zero, ConvectionScheme::Upwind);
    CHECK(norm(t0, NormKind::Linf) == 0.0);

    MACVectorField v = random_noslip(g, 17);
    leray_project(v);
    ScalarField c(g, ScalarBC::HomogeneousNeumann, 0.75);
    ScalarField tc = advect(c, v, ConvectionScheme::Upwind);
    // constants are transported invariantly once div v = 0
    CHECK(norm(tc, NormKind::Linf) < 1e-12);

    ScalarField tf = advect(f, v, ConvectionScheme::Upwind);
    double cellsum = mean(tf) * g.cells();
    CHECK(std::fabs(cellsum) < 1e-11);
}

TEST_CASE("advect upwind creates no new extrema over 100 steps") {
    Grid g(48, 48, 1.0, 1.0);
    // smooth bump
    ScalarField f = fill(g, ScalarBC::HomogeneousNeumann, [](double x, double y) {
        double r2 = (x - 0.4) * (x - 0.4) + (y - 0.5) * (y - 0.5);
        return std::exp(-40.0 * r2);
    });
    MACVectorField v = random_noslip(g, 23);
    leray_project(v);
    double fmax0 = norm(f, NormKind::Linf);
    double fmin0 = kern::scalar_kernels().vmin(f.data(), f.size());
    double dt = 0.2 * std::min(g.dx, g.dy) / (norm(v, NormKind::Linf) + 1e-12);
    for (int s = 0; s < 100; ++s) {
        ScalarField t = advect(f, v, ConvectionScheme::Upwind);
        for (std::size_t i = 0; i < f.size(); ++i) f.data()[i] += dt * t.data()[i];
    }
    CHECK(norm(f, NormKind::Linf) <= fmax0 + 1e-12);
    CHECK(kern::scalar_kernels().vmin(f.data(), f.size()) >= fmin0 - 1e-12);
}

TEST_CASE("centered advection is second-order accurate") {
    // analytic solenoidal v sampled at faces; tendency vs -v.grad(f)
    double prev = 0.0;
    for (int lev = 0; lev < 3; ++lev) {
        int n = 32 << lev;
        Grid g(n, n, 1.0, 1.0);
        ScalarField f = fill(g, ScalarBC::HomogeneousNeumann, [](double x, double y) {
            return std::cos(kPi * x) * std::cos(2.0 * kPi * y);
        });
        MACVectorField v(g);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                double x = g.xf(i), y = g.yc(j);
                double sx = std::sin(kPi * x);
                v.ux(i, j) = sx * sx * kPi * std::sin(2.0 * kPi * y);
            }
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = g.xc(i), y = g.yf(j);
                double sy = std::sin(kPi * y);
                v.uy(i, j) = -kPi * std::sin(2.0 * kPi * x) * sy * sy;
            }
        v.apply_noslip();
        ScalarField t = advect(f, v, ConvectionScheme::Centered);
        double err = 0.0;
        for (int j = 2; j < g.ny - 2; ++j)
            for (int i = 2; i < g.nx - 2; ++i) {
                double x = g.xc(i), y = g.yc(j);
                double sx = std::sin(kPi * x);
                double vx = sx * sx * kPi * std::sin(2.0 * kPi * y);
                double sy = std::sin(kPi * y);
                double vy = -kPi * std::sin(2.0 * kPi * x) * sy * sy;
                double fx = -kPi * std::sin(kPi * x) * std::cos(2.0 * kPi * y);
                double fy = -2.0 * kPi * std::cos(kPi * x) * std::sin(2.0 * kPi * y);
                err = std::max(err, std::fabs(t(i, j) + vx * fx + vy * fy));
            }
        if (lev > 0) CHECK(prev / err > 3.4);
        prev = err;
    }
}

TEST_CASE("norm oracles on sin(pi x) sin(pi y)") {
    Grid g(96, 96, 1.0, 1.0);
    ScalarField f = fill(g, ScalarBC::HomogeneousDirichlet,
                         [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    CHECK(norm(f, NormKind::L2) == doctest::Approx(0.5).epsilon(2e-4));
    double h1 = norm(f, NormKind::H1semi);
    CHECK(h1 * h1 == doctest::Approx(kPi * kPi / 2.0).epsilon(2e-3));
    CHECK(norm(f, NormKind::Linf) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("norms: zero field, homogeneity, triangle inequality") {
    Grid g(20, 28, 1.0, 1.5);
    ScalarField z(g, ScalarBC::HomogeneousNeumann);
    for (NormKind k : {NormKind::L2, NormKind::L4, NormKind::H1semi, NormKind::H2, NormKind::Linf})
        CHECK(norm(z, k) == 0.0);

    for (unsigned seed = 0; seed < 4; ++seed) {
        ScalarField a = random_field(g, ScalarBC::HomogeneousNeumann, seed);
        ScalarField b = random_field(g, ScalarBC::HomogeneousNeumann, seed + 100);
        for (NormKind k :
             {NormKind::L2, NormKind::L4, NormKind::H1semi, NormKind::H2, NormKind::Linf}) {
            ScalarField a3 = a;
            kern::kernels().scale(-3.0, a3.data(), a3.size());
            CHECK(norm(a3, k) == doctest::Approx(3.0 * norm(a, k)).epsilon(1e-12));
            ScalarField s = a;
            kern::kernels().axpy(1.0, b.data(), s.data(), s.size());
            CHECK(norm(s, k) <= norm(a, k) + norm(b, k) + 1e-12);
        }
    }
}

TEST_CASE("holder seminorm: exact small-grid maximization and gamma guard") {
    Grid g(8, 8, 1.0, 1.0);
    ScalarField f = random_field(g, ScalarBC::HomogeneousNeumann, 7);
    CHECK_THROWS_AS(holder_seminorm(f, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(holder_seminorm(f, 0.0), std::invalid_argument);
    double h = holder_seminorm(f, 0.5);
    // brute-force reference
    double best = 0.0;
    for (int j1 = 0; j1 < 8; ++j1)
        for (int i1 = 0; i1 < 8; ++i1)
            for (int j2 = 0; j2 < 8; ++j2)
                for (int i2 = 0; i2 < 8; ++i2) {
                    if (i1 == i2 && j1 == j2) continue;
                    double r = std::hypot((i1 - i2) * g.dx, (j1 - j2) * g.dy);
                    best = std::max(best, std::fabs(f(i1, j1) - f(i2, j2)) / std::sqrt(r));
                }
    CHECK(h == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("sym_grad: zero field, pure shear patch, Korn ratio") {
    Grid g(32, 32, 1.0, 1.0);
    MACVectorField z(g);
    TensorField tz = sym_grad(z);
    CHECK(tz.xy(5, 5) == 0.0);

    // v = (y, 0) in the interior: off-diagonal 1/2, diagonal 0
    MACVectorField sh(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) sh.ux(i, j) = g.yc(j);
    TensorField ts = sym_grad(sh);
    for (int j = g.ny / 4; j < 3 * g.ny / 4; ++j)
        for (int i = g.nx / 4; i < 3 * g.nx / 4; ++i) {
            CHECK(ts.xx(i, j) == doctest::Approx(0.0));
            CHECK(ts.xy(i, j) == doctest::Approx(0.5).epsilon(1e-12));
        }

    // Korn: ||grad u|| <= sqrt(2) ||D u|| (1 + O(h)) on no-slip fields
    int violations = 0;
    for (unsigned seed = 0; seed < 30; ++seed) {
        MACVectorField u = random_noslip(g, 1000 + seed);
        double gn = norm(u, NormKind::H1semi);
        TensorField d = sym_grad(u);
        double dn = 0.0;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                dn += (d.xx(i, j) * d.xx(i, j) + d.yy(i, j) * d.yy(i, j)) * g.cell_volume();
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                dn += 2.0 * d.xy(i, j) * d.xy(i, j) * node_weight(g, i, j);
        dn = std::sqrt(dn);
        double ratio = gn / dn;
        if (!(ratio >= 1.0 - 1e-12 && ratio <= std::sqrt(2.0) * (1.0 + 2.0 * g.dx))) ++violations;
    }
    CHECK(violations == 0);
}
