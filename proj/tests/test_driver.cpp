#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "nschb/io.hpp"
#include "nschb/kernels.hpp"
#include "nschb/norms.hpp"
#include "nschb/sim.hpp"

using namespace nschb;

namespace {

const char* kBaseConfig = R"(
[grid]
nx = 24
ny = 24

[time]
dt = 2e-3
t_end = 0.02
report_interval = 2

[initial]
preset = "strong_data"
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, rejects") {
    SimConfig c = config_from_string(kBaseConfig);
    CHECK(c.nx == 24);
    CHECK(c.potential.A == 1.0);
    CHECK(c.initial.phi_profile == "cosine");
    CHECK(c.initial.phi_amplitude == 0.9);
    CHECK(c.mode == SimMode::Full);

    CHECK_THROWS(config_from_string("[time]\ndt = -1\n"));
    CHECK_THROWS(config_from_string("[time\ndt = 1e-3\n"));
    CHECK_THROWS(config_from_string("[potential]\nA = 3.0\nB = 2.0\n"));
    CHECK_THROWS(config_from_string("[solvers]\nmethod = \"magic\"\n"));
    CHECK_THROWS(config_from_string("[grid]\nnx = 2\n"));

    SimConfig g = config_from_string("[galerkin]\nenabled = true\nm = 4\n");
    CHECK(g.mode == SimMode::Galerkin);
    SimConfig d = config_from_string("[cahn_hilliard]\ndecoupled = true\n");
    CHECK(d.mode == SimMode::DecoupledCH);
}

TEST_CASE("all-zero initial data stays at rest") {
    SimConfig c = config_from_string("[grid]\nnx = 16\nny = 16\n[time]\ndt = 1e-3\nt_end = 5e-3\n");
    RunResult r = run(c, "");
    CHECK(r.exit_code == 0);
    CHECK(r.invariants.mass_drift == 0.0);
    CHECK(r.invariants.divergence_max == 0.0);
    CHECK(r.energy_series.back().e1 == 0.0);
}

TEST_CASE("decoupled CH mode: no energy violations, tiny mass drift") {
    std::string cfg = R"(
[grid]
nx = 32
ny = 32
[time]
dt = 2e-3
t_end = 0.1
[cahn_hilliard]
decoupled = true
[initial]
phi_profile = "random"
phi_amplitude = 0.05
phi_seed = 77
)";
    RunResult r = run(config_from_string(cfg), "");
    CHECK(r.exit_code == 0);
    CHECK(r.invariants.energy_violations == 0);
    CHECK(r.invariants.mass_drift <= 1e-12);
}

TEST_CASE("determinism: identical configs give bit-identical report CSVs") {
    SimConfig c = config_from_string(kBaseConfig);
    std::filesystem::path tmp = std::filesystem::temp_directory_path() / "nschb_det";
    std::filesystem::remove_all(tmp);
    RunResult r1 = run(c, (tmp / "a").string());
    RunResult r2 = run(c, (tmp / "b").string());
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(slurp((tmp / "a" / "energy.csv").string()) ==
          slurp((tmp / "b" / "energy.csv").string()));
    CHECK(slurp((tmp / "a" / "invariants.csv").string()) ==
          slurp((tmp / "b" / "invariants.csv").string()));
    std::filesystem::remove_all(tmp);
}

TEST_CASE("restartability: snapshot at T/2 resumes to match a straight run") {
    std::filesystem::path tmp = std::filesystem::temp_directory_path() / "nschb_restart";
    std::filesystem::remove_all(tmp);
    std::filesystem::create_directories(tmp);

    SimConfig full = config_from_string(kBaseConfig);
    Simulation straight(full);
    long nsteps = std::llround(full.t_end / full.dt);
    for (long s = 0; s < nsteps; ++s) straight.step();

    Simulation first(full);
    for (long s = 0; s < nsteps / 2; ++s) first.step();
    write_scalar_csv((tmp / "phi.csv").string(), first.state().phi, "phi", first.state().t);
    write_scalar_csv((tmp / "theta.csv").string(), first.state().theta, "theta",
                     first.state().t);
    write_mac_csv((tmp / "ux.csv").string(), (tmp / "uy.csv").string(), first.state().u, "u",
                  first.state().t);

    SimConfig resumed = full;
    resumed.initial = InitialSpec{};
    resumed.initial.preset = "custom";
    resumed.initial.phi_file = (tmp / "phi.csv").string();
    resumed.initial.theta_file = (tmp / "theta.csv").string();
    resumed.initial.ux_file = (tmp / "ux.csv").string();
    resumed.initial.uy_file = (tmp / "uy.csv").string();
    Simulation second(resumed);
    for (long s = 0; s < nsteps - nsteps / 2; ++s) second.step();

    const Grid& g = straight.grid();
    double dphi = 0.0, dth = 0.0, du = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            dphi = std::max(dphi,
                            std::fabs(straight.state().phi(i, j) - second.state().phi(i, j)));
            dth = std::max(dth,
                           std::fabs(straight.state().theta(i, j) - second.state().theta(i, j)));
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            du = std::max(du, std::fabs(straight.state().u.ux(i, j) - second.state().u.ux(i, j)));
    CHECK(dphi < 1e-10);
    CHECK(dth < 1e-10);
    CHECK(du < 1e-10);
    std::filesystem::remove_all(tmp);
}

TEST_CASE("snapshot round trip is exact at 17 significant digits") {
    Grid g(16, 12, 1.25, 0.75);
    ScalarField f(g, ScalarBC::HomogeneousDirichlet);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) f(i, j) = d(rng);
    auto tmp = std::filesystem::temp_directory_path() / "nschb_snap.csv";
    write_scalar_csv(tmp.string(), f, "phi", 0.375);
    double t = 0.0;
    std::string name;
    ScalarField rf = read_scalar_csv(tmp.string(), &t, &name);
    CHECK(t == 0.375);
    CHECK(name == "phi");
    CHECK(rf.bc() == ScalarBC::HomogeneousDirichlet);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) CHECK(rf(i, j) == f(i, j));
    std::filesystem::remove(tmp);
}

TEST_CASE("convergence study rejects fewer than 3 levels") {
    SimConfig c = config_from_string(kBaseConfig);
    CHECK_THROWS_AS(convergence_study(c, {32, 64}, "heat"), std::invalid_argument);
    CHECK_THROWS_AS(convergence_study(c, {16, 24, 32}, "nonsense"), std::invalid_argument);
}

TEST_CASE("perturbation: eps = 0 gives identically zero lambda") {
    SimConfig c = config_from_string(kBaseConfig);
    PerturbationResult r = perturbation_experiment(c, 0.0, 0.01);
    for (double l : r.lambda) CHECK(l == 0.0);
}

TEST_CASE("galerkin mode writes coherent modal trajectories") {
    std::string cfg = R"(
[grid]
nx = 24
ny = 24
[time]
dt = 1e-3
t_end = 0.01
[galerkin]
enabled = true
m = 4
[initial]
preset = "strong_data"
u_profile = "vortex"
u_amplitude = 0.1
)";
    SimConfig c = config_from_string(cfg);
    Simulation sim(c);
    CHECK(sim.galerkin_basis() != nullptr);
    CHECK(static_cast<int>(sim.galerkin_coeffs().size()) == 4);
    for (int s = 0; s < 10; ++s) sim.step();
    // velocity equals the modal assembly
    MACVectorField u = galerkin_assemble(sim.galerkin_coeffs(), *sim.galerkin_basis());
    kern::kernels().axpy(-1.0, sim.state().u.ux_data(), u.ux_data(), sim.grid().xfaces());
    kern::kernels().axpy(-1.0, sim.state().u.uy_data(), u.uy_data(), sim.grid().yfaces());
    CHECK(norm(u, NormKind::Linf) < 1e-14);
}

TEST_CASE("invariant violation surfaces as exit code 2") {
    std::string cfg = R"(
[grid]
nx = 16
ny = 16
[time]
dt = 1e-3
t_end = 5e-3
[initial]
preset = "strong_data"
[output]
mass_tol = 1e-30
snapshots = false
)";
    RunResult r = run(config_from_string(cfg), "");
    CHECK(r.exit_code == 2);
    CHECK(r.error == "invariant violation");
}

TEST_CASE("galerkin run persists the eigenmode cache with a manifest entry") {
    std::string cfg = R"(
[grid]
nx = 16
ny = 16
[time]
dt = 1e-3
t_end = 3e-3
[galerkin]
enabled = true
m = 3
[initial]
preset = "strong_data"
)";
    auto tmp = std::filesystem::temp_directory_path() / "nschb_galout";
    std::filesystem::remove_all(tmp);
    RunResult r = run(config_from_string(cfg), tmp.string());
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::exists(tmp / "mode_01_ux.csv"));
    CHECK(std::filesystem::exists(tmp / "mode_03_uy.csv"));
    CHECK(std::filesystem::exists(tmp / "modes.csv"));
    std::ifstream jf(tmp / "run.json");
    std::stringstream ss;
    ss << jf.rdbuf();
    CHECK(ss.str().find("mode_01_ux.csv") != std::string::npos);
    CHECK(ss.str().find("eigenvalues") != std::string::npos);
    std::filesystem::remove_all(tmp);
}
