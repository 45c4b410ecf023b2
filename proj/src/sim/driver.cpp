#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <random>
#include <thread>

#include "json.hpp"
#include "nschb/io.hpp"
#include "nschb/kernels.hpp"
#include "nschb/norms.hpp"
#include "nschb/operators.hpp"
#include "nschb/poisson.hpp"
#include "nschb/sim.hpp"

namespace nschb {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kVersion = "0.1.0";

ScalarField build_phi(const Grid& g, const InitialSpec& s) {
    ScalarField f(g, ScalarBC::HomogeneousNeumann, s.phi_mean);
    if (!s.phi_file.empty()) {
        ScalarField r = read_scalar_csv(s.phi_file);
        if (r.grid() != g) throw std::invalid_argument("initial phi snapshot grid mismatch");
        r.set_bc(ScalarBC::HomogeneousNeumann);
        return r;
    }
    if (s.phi_profile == "zero") return f;
    if (s.phi_profile == "constant") return f;  // mean only
    if (s.phi_profile == "cosine") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f(i, j) += s.phi_amplitude * std::cos(kPi * g.xc(i) / g.lx) *
                           std::cos(kPi * g.yc(j) / g.ly);
        return f;
    }
    if (s.phi_profile == "tanh_strip") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f(i, j) += s.phi_amplitude *
                           std::tanh((g.yc(j) - 0.5 * g.ly) / (0.1 * g.ly));
        return f;
    }
    if (s.phi_profile == "random") {
        std::mt19937_64 rng(s.phi_seed);
        std::uniform_real_distribution<double> d(-s.phi_amplitude, s.phi_amplitude);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) f(i, j) += d(rng);
        return f;
    }
    throw std::invalid_argument("unknown phi profile '" + s.phi_profile + "'");
}

ScalarField build_theta(const Grid& g, const InitialSpec& s) {
    if (!s.theta_file.empty()) {
        ScalarField r = read_scalar_csv(s.theta_file);
        if (r.grid() != g) throw std::invalid_argument("initial theta snapshot grid mismatch");
        r.set_bc(ScalarBC::HomogeneousDirichlet);
        return r;
    }
    ScalarField f(g, ScalarBC::HomogeneousDirichlet);
    if (s.theta_profile == "zero") return f;
    if (s.theta_profile == "bump") {
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f(i, j) = s.theta_amplitude * std::sin(kPi * g.xc(i) / g.lx) *
                          std::sin(kPi * g.yc(j) / g.ly);
        return f;
    }
    throw std::invalid_argument("unknown theta profile '" + s.theta_profile + "'");
}

MACVectorField build_u(const Grid& g, const InitialSpec& s) {
    if (!s.ux_file.empty() || !s.uy_file.empty()) {
        MACVectorField u = read_mac_csv(s.ux_file, s.uy_file);
        if (u.grid() != g) throw std::invalid_argument("initial velocity snapshot grid mismatch");
        if (norm(div(u), NormKind::Linf) > 1e-8) leray_project(u);
        u.apply_noslip();
        return u;
    }
    MACVectorField u(g);
    if (s.u_profile == "zero") return u;
    if (s.u_profile == "vortex") {
        // discrete curl of a node streamfunction: exactly solenoidal, no-slip
        auto psi = [&](double x, double y) {
            double sx = std::sin(kPi * x / g.lx), sy = std::sin(kPi * y / g.ly);
            return s.u_amplitude * sx * sx * sy * sy;
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
    throw std::invalid_argument("unknown velocity profile '" + s.u_profile + "'");
}

}  // namespace

Simulation::Simulation(const SimConfig& cfg) : cfg_(cfg), grid_(cfg.nx, cfg.ny, cfg.lx, cfg.ly) {
    cfg_.validate();
    cfg_.ch.dt = cfg_.dt;
    cfg_.ns.dt = cfg_.dt;

    state_.t = 0.0;
    state_.phi = build_phi(grid_, cfg_.initial);
    if (norm(state_.phi, NormKind::Linf) > 1.0)
        throw std::invalid_argument("initial phi violates ||phi0||_inf <= 1");
    if (std::fabs(mean(state_.phi)) >= 1.0)
        throw std::invalid_argument("initial phi violates |mean phi0| < 1");
    state_.theta = build_theta(grid_, cfg_.initial);
    state_.u = build_u(grid_, cfg_.initial);
    state_.p = ScalarField(grid_, ScalarBC::HomogeneousNeumann);
    cfg_.coefficients.theta_max =
        std::max(cfg_.coefficients.theta_max, norm(state_.theta, NormKind::Linf) + 1.0);
    cfg_.coefficients.finalize();

    // mu0 = -Lap(phi0) + W'(phi0) whenever phi0 is strictly separated
    state_.mu = ScalarField(grid_, ScalarBC::HomogeneousNeumann);
    if (norm(state_.phi, NormKind::Linf) < 1.0) {
        ScalarField lap = laplacian(state_.phi);
        for (std::size_t i = 0; i < lap.size(); ++i)
            state_.mu.data()[i] =
                -lap.data()[i] +
                eval_potential(cfg_.potential, state_.phi.data()[i], PotentialPart::Wp);
    }

    if (cfg_.mode == SimMode::Galerkin) {
        gal_basis_ = GalerkinBasis::build(grid_, cfg_.galerkin_m, cfg_.solvers,
                                          cfg_.galerkin_m > 16 ? 1e-5 : 1e-7);
        gal_coeffs_ = galerkin_project(state_.u, *gal_basis_).coeffs;
        state_.u = galerkin_assemble(gal_coeffs_, *gal_basis_);
    }
}

void Simulation::step() {
    const double dt = cfg_.dt;
    try {
        if (cfg_.mode == SimMode::DecoupledCH) {
            MACVectorField zero(grid_);
            CHStepResult ch = ch_step(state_.phi, zero, cfg_.potential, cfg_.ch);
            state_.phi = std::move(ch.phi);
            state_.mu = std::move(ch.mu);
        } else {
            ScalarField theta_next = theta_step(state_.theta, state_.u, cfg_.coefficients, dt,
                                                cfg_.theta_scheme, cfg_.solvers);
            CHStepResult ch = ch_step(state_.phi, state_.u, cfg_.potential, cfg_.ch);
            if (cfg_.mode == SimMode::Galerkin) {
                gal_coeffs_ = galerkin_ns_step(gal_coeffs_, *gal_basis_, ch.phi, theta_next,
                                               cfg_.potential, cfg_.coefficients, cfg_.physics,
                                               dt);
                state_.u = galerkin_assemble(gal_coeffs_, *gal_basis_);
            } else {
                NSStepResult ns = ns_step(state_.u, ch.phi, theta_next, cfg_.physics,
                                          cfg_.coefficients, cfg_.potential, cfg_.ns);
                state_.u = std::move(ns.u);
                state_.p = std::move(ns.p);
            }
            state_.phi = std::move(ch.phi);
            state_.mu = std::move(ch.mu);
            state_.theta = std::move(theta_next);
        }
    } catch (const SolverError& e) {
        throw SolverError("step " + std::to_string(step_ + 1) + ": " + e.what(), e.residual(),
                          e.iterations());
    }
    ++step_;
    state_.t += dt;
}

namespace {

void write_snapshot_set(const std::string& dir, int index, const SimState& s,
                        std::vector<std::string>& files) {
    // emitted snapshots must satisfy the state invariants
    if (!(norm(s.phi, NormKind::Linf) < 1.0))
        throw std::runtime_error("snapshot rejected: ||phi||_inf >= 1");
    if (norm(div(s.u), NormKind::Linf) > 1e-6)
        throw std::runtime_error("snapshot rejected: velocity is not solenoidal");
    char tag[32];
    std::snprintf(tag, sizeof tag, "%04d", index);
    auto path = [&](const std::string& stem) { return dir + "/" + stem + "_" + tag + ".csv"; };
    write_scalar_csv(path("phi"), s.phi, "phi", s.t);
    write_scalar_csv(path("mu"), s.mu, "mu", s.t);
    write_scalar_csv(path("theta"), s.theta, "theta", s.t);
    write_scalar_csv(path("p"), s.p, "p", s.t);
    write_mac_csv(path("u_ux"), path("u_uy"), s.u, "u", s.t);
    for (const char* stem : {"phi", "mu", "theta", "p", "u_ux", "u_uy"})
        files.push_back(std::string(stem) + "_" + tag + ".csv");
}

nlohmann::json config_echo(const SimConfig& c) {
    nlohmann::json j;
    j["grid"] = {{"nx", c.nx}, {"ny", c.ny}, {"lx", c.lx}, {"ly", c.ly}};
    j["time"] = {{"dt", c.dt},
                 {"t_end", c.t_end},
                 {"snapshot_interval", c.snapshot_interval},
                 {"report_interval", c.report_interval}};
    j["potential"] = {{"A", c.potential.A}, {"B", c.potential.B}};
    j["coefficients"] = {{"nu0", c.coefficients.nu0},       {"nu1", c.coefficients.nu1},
                         {"kappa0", c.coefficients.kappa0}, {"kappa1", c.coefficients.kappa1},
                         {"lambda0", c.coefficients.lambda0}, {"a", c.coefficients.a},
                         {"b", c.coefficients.b}};
    j["physics"] = {{"Ra", c.physics.Ra}, {"Ga", c.physics.Ga}, {"g", c.physics.g}};
    j["solvers"] = {{"rel_tol", c.solvers.rel_tol},
                    {"max_iter", c.solvers.max_iter},
                    {"method", c.solvers.method == SolverConfig::Method::ConjugateGradient
                                   ? "cg"
                                   : "multigrid"}};
    j["mode"] = c.mode == SimMode::Full ? "full"
                : c.mode == SimMode::DecoupledCH ? "decoupled_ch" : "galerkin";
    if (c.mode == SimMode::Galerkin) j["galerkin_m"] = c.galerkin_m;
    j["initial"] = {{"preset", c.initial.preset},
                    {"phi_profile", c.initial.phi_profile},
                    {"phi_amplitude", c.initial.phi_amplitude},
                    {"theta_profile", c.initial.theta_profile},
                    {"theta_amplitude", c.initial.theta_amplitude},
                    {"u_profile", c.initial.u_profile}};
    return j;
}

}  // namespace

RunResult run(const SimConfig& cfg, const std::string& out_dir) {
    auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    const bool out = !out_dir.empty();
    if (out) std::filesystem::create_directories(out_dir);

    Simulation sim(cfg);
    const long nsteps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));
    const long snap_every =
        cfg.snapshot_interval > 0.0
            ? std::max<long>(1, static_cast<long>(std::llround(cfg.snapshot_interval / cfg.dt)))
            : 0;

    InvariantAccumulator acc(cfg.potential, cfg.mode == SimMode::DecoupledCH);
    acc.observe(sim.state().u, sim.state().phi, sim.state().theta);

    std::unique_ptr<EnergyCsvWriter> energy_csv;
    std::unique_ptr<InvariantCsvWriter> inv_csv;
    std::unique_ptr<ModesCsvWriter> modes_csv;
    std::vector<std::string> files;
    if (out) {
        energy_csv = std::make_unique<EnergyCsvWriter>(out_dir + "/energy.csv");
        inv_csv = std::make_unique<InvariantCsvWriter>(out_dir + "/invariants.csv");
        files.push_back("energy.csv");
        files.push_back("invariants.csv");
        if (cfg.mode == SimMode::Galerkin) {
            modes_csv = std::make_unique<ModesCsvWriter>(out_dir + "/modes.csv", cfg.galerkin_m);
            files.push_back("modes.csv");
        }
    }
    int snap_index = 0;
    if (out && cfg.write_snapshots) write_snapshot_set(out_dir, snap_index++, sim.state(), files);

    // persist the eigenmode cache alongside the snapshots
    nlohmann::json gal_manifest;
    if (out && cfg.mode == SimMode::Galerkin && sim.galerkin_basis()) {
        const GalerkinBasis& b = *sim.galerkin_basis();
        gal_manifest["eigenvalues"] = b.eigenvalues;
        std::vector<std::string> mode_files;
        for (int q = 0; q < b.m; ++q) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "%02d", q + 1);
            std::string ux = "mode_" + std::string(tag) + "_ux.csv";
            std::string uy = "mode_" + std::string(tag) + "_uy.csv";
            write_mac_csv(out_dir + "/" + ux, out_dir + "/" + uy, b.modes[q],
                          "w" + std::string(tag), 0.0);
            mode_files.push_back(ux);
            mode_files.push_back(uy);
            files.push_back(ux);
            files.push_back(uy);
        }
        gal_manifest["mode_files"] = mode_files;
    }

    ScalarField theta_prev = sim.state().theta;
    MACVectorField u_prev = sim.state().u;
    ScalarField phi_prev = sim.state().phi;

    {
        ScalarField theta_t(sim.grid(), ScalarBC::HomogeneousDirichlet);
        EnergyReport r0 = energy_report(0.0, sim.state().u, sim.state().phi, sim.state().mu,
                                        sim.state().theta, theta_t, cfg.potential,
                                        cfg.coefficients);
        res.energy_series.push_back(r0);
        if (energy_csv) energy_csv->row(r0);
        if (inv_csv) inv_csv->row(0.0, acc.report());
        if (modes_csv) modes_csv->row(0.0, sim.galerkin_coeffs());
    }

    try {
        for (long s = 1; s <= nsteps; ++s) {
            sim.step();
            acc.observe(sim.state().u, sim.state().phi, sim.state().theta);

            if (s % cfg.report_interval == 0 || s == nsteps) {
                ScalarField theta_t(sim.grid(), ScalarBC::HomogeneousDirichlet);
                kern::kernels().triad(theta_t.data(), 1.0 / cfg.dt, sim.state().theta.data(),
                                      -1.0 / cfg.dt, theta_prev.data(), theta_t.size());
                EnergyReport r =
                    energy_report(sim.state().t, sim.state().u, sim.state().phi, sim.state().mu,
                                  sim.state().theta, theta_t, cfg.potential, cfg.coefficients);
                energy_report_companions(r, u_prev, sim.state().u, phi_prev, sim.state().phi,
                                         theta_prev, sim.state().theta, cfg.dt,
                                         cfg.coefficients);
                res.energy_series.push_back(r);
                if (energy_csv) energy_csv->row(r);
                if (inv_csv) inv_csv->row(sim.state().t, acc.report());
                if (modes_csv) modes_csv->row(sim.state().t, sim.galerkin_coeffs());
            }
            if (out && cfg.write_snapshots && snap_every > 0 && s % snap_every == 0 && s != nsteps)
                write_snapshot_set(out_dir, snap_index++, sim.state(), files);

            theta_prev = sim.state().theta;
            u_prev = sim.state().u;
            phi_prev = sim.state().phi;
        }
        if (out && cfg.write_snapshots)
            write_snapshot_set(out_dir, snap_index++, sim.state(), files);
    } catch (const std::exception& e) {
        res.error = e.what();
        res.exit_code = 1;
        if (out && cfg.write_snapshots) {
            // persist the last good state for post-mortem restarts
            SimState last;
            last.t = sim.state().t;
            last.u = u_prev;
            last.phi = phi_prev;
            last.theta = theta_prev;
            last.mu = sim.state().mu;
            last.p = sim.state().p;
            write_snapshot_set(out_dir, 9999, last, files);
        }
    }

    res.steps = sim.step_index();
    res.invariants = acc.report();
    if (res.exit_code == 0) {
        if (res.invariants.mass_drift > cfg.mass_tol ||
            res.invariants.theta_max_excess > cfg.theta_excess_tol ||
            res.invariants.divergence_max > cfg.divergence_tol ||
            !(res.invariants.min_separation > 0.0)) {
            res.exit_code = 2;
            res.error = "invariant violation";
        }
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (out) {
        nlohmann::json j;
        j["config"] = config_echo(cfg);
        j["version"] = {{"nschb", kVersion}, {"simd", kern::active_isa()}};
        j["summary"] = {{"steps", res.steps},
                        {"wall_seconds", res.wall_seconds},
                        {"exit_code", res.exit_code},
                        {"error", res.error},
                        {"mass_drift", res.invariants.mass_drift},
                        {"theta_max_excess", res.invariants.theta_max_excess},
                        {"min_separation", res.invariants.min_separation},
                        {"energy_violations", res.invariants.energy_violations},
                        {"divergence_max", res.invariants.divergence_max}};
        if (!res.energy_series.empty()) {
            const EnergyReport& last = res.energy_series.back();
            j["summary"]["final_e1"] = last.e1;
            j["summary"]["final_kinetic"] = last.kinetic;
            j["summary"]["final_beta"] = last.beta;
        }
        if (!gal_manifest.is_null()) j["galerkin"] = gal_manifest;
        j["files"] = files;
        std::ofstream jf(out_dir + "/run.json");
        jf << j.dump(2) << "\n";
    }
    return res;
}

namespace {

// manufactured heat solution theta* = A sin(kx x) sin(ky y) e^{-t}
struct HeatMMS {
    double A = 0.7, kx, ky;
    const CoefficientModel* m;

    double value(double x, double y, double t) const {
        return A * std::sin(kx * x) * std::sin(ky * y) * std::exp(-t);
    }
    double source(double x, double y, double t) const {
        double th = value(x, y, t);
        double e = std::exp(-t);
        double gx = A * kx * std::cos(kx * x) * std::sin(ky * y) * e;
        double gy = A * ky * std::sin(kx * x) * std::cos(ky * y) * e;
        double lap = -(kx * kx + ky * ky) * th;
        double kp = m->kappa1 * (1.0 - std::tanh(th) * std::tanh(th));
        return -th - (kp * (gx * gx + gy * gy) + m->kappa(th) * lap);
    }
};

// manufactured phase solution phi* = A cos(kx x) cos(ky y) e^{-t}
struct CHMMS {
    double A = 0.5, kx, ky;
    const PotentialParams* p;

    double value(double x, double y, double t) const {
        return A * std::cos(kx * x) * std::cos(ky * y) * std::exp(-t);
    }
    double source(double x, double y, double t) const {
        double ph = value(x, y, t);
        double e = std::exp(-t);
        double gx = -A * kx * std::sin(kx * x) * std::cos(ky * y) * e;
        double gy = -A * ky * std::cos(kx * x) * std::sin(ky * y) * e;
        double k2 = kx * kx + ky * ky;
        double lap = -k2 * ph;
        double bilap = k2 * k2 * ph;
        double wpp = eval_potential(*p, ph, PotentialPart::Wpp);
        double wppp = potential_third(*p, ph);
        double lap_wp = wpp * lap + wppp * (gx * gx + gy * gy);
        double lap_mu = -bilap + lap_wp;
        return -ph - lap_mu;
    }
};

double fit_order(const std::vector<double>& hs, const std::vector<double>& errs) {
    // least-squares slope of log(err) against log(h)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(hs.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(hs[i]), y = std::log(errs[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

int worker_limit() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    unsigned lim = std::min(hw, 4u);
    if (const char* env = std::getenv("NSCHB_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) lim = static_cast<unsigned>(std::min<long>(v, hw));
    }
    return static_cast<int>(lim);
}

ConvergenceTable convergence_study(const SimConfig& cfg, const std::vector<int>& levels,
                                   const std::string& target) {
    if (levels.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 levels");
    ConvergenceTable table;
    table.target = target;

    auto run_heat = [&](int n) -> std::pair<double, double> {
        Grid g(n, n, cfg.lx, cfg.ly);
        HeatMMS mms{0.7, kPi / cfg.lx, kPi / cfg.ly, &cfg.coefficients};
        double dt = cfg.dt * (static_cast<double>(levels[0]) / n) *
                    (static_cast<double>(levels[0]) / n);
        long steps = std::max<long>(1, std::llround(cfg.t_end / dt));
        dt = cfg.t_end / static_cast<double>(steps);
        ScalarField th(g, ScalarBC::HomogeneousDirichlet);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) th(i, j) = mms.value(g.xc(i), g.yc(j), 0.0);
        MACVectorField u(g);
        ScalarField src(g, ScalarBC::HomogeneousDirichlet);
        for (long s = 0; s < steps; ++s) {
            double tn1 = (s + 1) * dt;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) src(i, j) = mms.source(g.xc(i), g.yc(j), tn1);
            th = theta_step(th, u, cfg.coefficients, dt, cfg.theta_scheme, cfg.solvers, &src);
        }
        ScalarField err(g, ScalarBC::HomogeneousDirichlet);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                err(i, j) = th(i, j) - mms.value(g.xc(i), g.yc(j), cfg.t_end);
        return {norm(err, NormKind::L2), dt};
    };

    auto run_ch = [&](int n) -> std::pair<double, double> {
        Grid g(n, n, cfg.lx, cfg.ly);
        CHMMS mms{0.5, kPi / cfg.lx, kPi / cfg.ly, &cfg.potential};
        double dt = cfg.dt * (static_cast<double>(levels[0]) / n) *
                    (static_cast<double>(levels[0]) / n);
        long steps = std::max<long>(1, std::llround(cfg.t_end / dt));
        dt = cfg.t_end / static_cast<double>(steps);
        ScalarField phi(g, ScalarBC::HomogeneousNeumann);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) phi(i, j) = mms.value(g.xc(i), g.yc(j), 0.0);
        MACVectorField u(g);
        CHStepConfig chc = cfg.ch;
        chc.dt = dt;
        ScalarField src(g, ScalarBC::HomogeneousNeumann);
        for (long s = 0; s < steps; ++s) {
            double tn1 = (s + 1) * dt;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) src(i, j) = mms.source(g.xc(i), g.yc(j), tn1);
            phi = ch_step(phi, u, cfg.potential, chc, &src).phi;
        }
        ScalarField err(g, ScalarBC::HomogeneousNeumann);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                err(i, j) = phi(i, j) - mms.value(g.xc(i), g.yc(j), cfg.t_end);
        return {norm(err, NormKind::L2), dt};
    };

    if (target == "heat" || target == "ch") {
        auto fn = target == "heat" ? std::function(run_heat) : std::function(run_ch);
        std::vector<std::future<std::pair<double, double>>> futs;
        int limit = worker_limit();
        std::vector<std::pair<double, double>> results(levels.size());
        for (std::size_t i = 0; i < levels.size(); i += limit) {
            std::size_t hi = std::min(levels.size(), i + limit);
            for (std::size_t k = i; k < hi; ++k)
                futs.push_back(std::async(std::launch::async, fn, levels[k]));
            for (std::size_t k = i; k < hi; ++k) results[k] = futs[k - i].get();
            futs.clear();
        }
        std::vector<double> hs, errs;
        for (std::size_t i = 0; i < levels.size(); ++i) {
            ConvergenceRow row;
            row.n = levels[i];
            row.error = results[i].first;
            row.dt = results[i].second;
            if (i > 0)
                row.order = std::log(results[i - 1].first / results[i].first) /
                            std::log(static_cast<double>(levels[i]) / levels[i - 1]);
            table.rows.push_back(row);
            hs.push_back(cfg.lx / levels[i]);
            errs.push_back(row.error);
        }
        table.fitted_order = fit_order(hs, errs);
        return table;
    }

    if (target == "coupled-time") {
        // self-convergence in dt on the configured grid
        auto run_to = [&](double dt) {
            SimConfig c = cfg;
            c.dt = dt;
            c.write_snapshots = false;
            Simulation sim(c);
            long steps = std::llround(cfg.t_end / dt);
            for (long s = 0; s < steps; ++s) sim.step();
            return sim;
        };
        std::vector<double> dts;
        for (std::size_t i = 0; i < levels.size(); ++i)
            dts.push_back(cfg.dt / static_cast<double>(1 << i));
        double dt_ref = dts.back() / 4.0;
        Simulation ref = run_to(dt_ref);
        std::vector<double> hs, errs;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            Simulation s = run_to(dts[i]);
            const auto& k = kern::kernels();
            const Grid& g = s.grid();
            ScalarField dphi(g, ScalarBC::HomogeneousNeumann);
            k.triad(dphi.data(), 1.0, s.state().phi.data(), -1.0, ref.state().phi.data(),
                    dphi.size());
            ScalarField dth(g, ScalarBC::HomogeneousDirichlet);
            k.triad(dth.data(), 1.0, s.state().theta.data(), -1.0, ref.state().theta.data(),
                    dth.size());
            MACVectorField du(g);
            k.triad(du.ux_data(), 1.0, s.state().u.ux_data(), -1.0, ref.state().u.ux_data(),
                    g.xfaces());
            k.triad(du.uy_data(), 1.0, s.state().u.uy_data(), -1.0, ref.state().u.uy_data(),
                    g.yfaces());
            double e2 = norm(dphi, NormKind::L2);
            double e3 = norm(dth, NormKind::L2);
            double e4 = norm(du, NormKind::L2);
            ConvergenceRow row;
            row.n = cfg.nx;
            row.dt = dts[i];
            row.error = std::sqrt(e2 * e2 + e3 * e3 + e4 * e4);
            if (i > 0)
                row.order = std::log(table.rows.back().error / row.error) / std::log(2.0);
            table.rows.push_back(row);
            hs.push_back(dts[i]);
            errs.push_back(row.error);
        }
        table.fitted_order = fit_order(hs, errs);
        return table;
    }

    throw std::invalid_argument("convergence_study: unknown target '" + target + "'");
}

PerturbationResult perturbation_experiment(const SimConfig& cfg, double eps, double t_end) {
    if (eps < 0.0) throw std::invalid_argument("perturbation_experiment: eps must be >= 0");
    SimConfig base = cfg;
    base.t_end = t_end;
    base.write_snapshots = false;
    Simulation a(base);
    Simulation b(base);

    // perturb phi0 (mean-zero bump) and theta0 (Dirichlet-compatible bump)
    {
        SimState& s = b.mutable_state();
        const Grid& g = s.phi.grid();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                s.phi(i, j) += eps * std::cos(kPi * g.xc(i) / g.lx) *
                               std::cos(kPi * g.yc(j) / g.ly);
                s.theta(i, j) += eps * std::sin(kPi * g.xc(i) / g.lx) *
                                 std::sin(kPi * g.yc(j) / g.ly);
            }
        if (norm(s.phi, NormKind::Linf) > 1.0)
            throw std::invalid_argument("perturbation too large: phi leaves [-1,1]");
    }

    PerturbationResult out;
    auto record = [&]() {
        out.times.push_back(a.state().t);
        out.lambda.push_back(continuous_dependence_lambda(
            a.state().u, a.state().phi, a.state().theta, b.state().u, b.state().phi,
            b.state().theta, cfg.solvers));
    };
    record();
    long steps = std::llround(t_end / cfg.dt);
    for (long s = 1; s <= steps; ++s) {
        a.step();
        b.step();
        if (s % cfg.report_interval == 0 || s == steps) record();
    }
    out.amplification = out.lambda.front() > 0.0 ? out.lambda.back() / out.lambda.front() : 0.0;
    return out;
}

}  // namespace nschb
