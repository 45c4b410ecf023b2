#pragma once
// Coupled time loop (theta -> Cahn-Hilliard -> Navier-Stokes per step,
// matching the per-subproblem freezing of the semi-Galerkin construction),
// configuration, experiments, and run output.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nschb/boussinesq.hpp"
#include "nschb/cahn_hilliard.hpp"
#include "nschb/coefficients.hpp"
#include "nschb/diagnostics.hpp"
#include "nschb/fields.hpp"
#include "nschb/galerkin.hpp"
#include "nschb/navier_stokes.hpp"
#include "nschb/potential.hpp"

namespace nschb {

enum class SimMode { Full, DecoupledCH, Galerkin };

struct InitialSpec {
    std::string preset = "zero";  // zero | weak_data | strong_data | custom
    std::string phi_profile = "zero";    // zero | constant | cosine | tanh_strip | random
    double phi_amplitude = 0.0;
    double phi_mean = 0.0;
    unsigned phi_seed = 1234;
    std::string theta_profile = "zero";  // zero | bump
    double theta_amplitude = 0.0;
    std::string u_profile = "zero";      // zero | vortex
    double u_amplitude = 0.0;
    std::string phi_file, theta_file, ux_file, uy_file;
};

struct SimConfig {
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    double dt = 1e-3;
    double t_end = 0.1;
    double snapshot_interval = 0.0;  // 0: only first/last
    int report_interval = 1;         // steps between energy rows

    PotentialParams potential;
    CoefficientModel coefficients;
    PhysicalParams physics;
    SolverConfig solvers;

    CHStepConfig ch;                 // dt copied from the driver
    ConvectionScheme theta_scheme = ConvectionScheme::Upwind;
    NSStepConfig ns;

    SimMode mode = SimMode::Full;
    bool galerkin_enabled = false;
    int galerkin_m = 8;

    InitialSpec initial;

    bool write_snapshots = true;
    double mass_tol = 1e-10;
    double theta_excess_tol = 1e-10;
    double divergence_tol = 1e-6;

    void validate() const;
};

// Parses the TOML-subset config file (sections, scalar keys, comments).
SimConfig load_config(const std::string& path);
SimConfig config_from_string(const std::string& text);

struct SimState {
    double t = 0.0;
    MACVectorField u;
    ScalarField p, phi, mu, theta;
};

class Simulation {
  public:
    explicit Simulation(const SimConfig& cfg);

    const SimConfig& config() const { return cfg_; }
    const SimState& state() const { return state_; }
    SimState& mutable_state() { return state_; }
    const Grid& grid() const { return grid_; }
    long step_index() const { return step_; }

    // advances one dt: theta step with u^n, CH step with u^n, NS step with
    // the fresh theta, phi, mu
    void step();

    const std::vector<double>& galerkin_coeffs() const { return gal_coeffs_; }
    const GalerkinBasis* galerkin_basis() const { return gal_basis_ ? &*gal_basis_ : nullptr; }

  private:
    SimConfig cfg_;
    Grid grid_;
    SimState state_;
    long step_ = 0;
    std::optional<GalerkinBasis> gal_basis_;
    std::vector<double> gal_coeffs_;
};

struct RunResult {
    InvariantReport invariants;
    long steps = 0;
    double wall_seconds = 0.0;
    int exit_code = 0;  // 0 ok, 1 solver failure, 2 invariant violation
    std::string error;
    std::vector<EnergyReport> energy_series;
};

// Full run with outputs under out_dir ("" disables file output).
RunResult run(const SimConfig& cfg, const std::string& out_dir);

struct ConvergenceRow {
    int n = 0;
    double dt = 0.0;
    double error = 0.0;
    double order = 0.0;  // vs previous row
};

struct ConvergenceTable {
    std::string target;
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;  // least-squares slope
};

// target: "heat" (manufactured theta), "ch" (manufactured phi),
// "coupled-time" (self-convergence in dt on a fixed grid). Needs >= 3 levels.
ConvergenceTable convergence_study(const SimConfig& cfg, const std::vector<int>& levels,
                                   const std::string& target);

struct PerturbationResult {
    std::vector<double> times;
    std::vector<double> lambda;  // Lambda(t) for the twin pair
    double amplification = 0.0;  // Lambda(T)/Lambda(0)
};

PerturbationResult perturbation_experiment(const SimConfig& cfg, double eps, double t_end);

// worker cap from NSCHB_THREADS (>=1)
int worker_limit();

}  // namespace nschb
