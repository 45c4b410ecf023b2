#pragma once
// The functionals the well-posedness estimates manipulate, computed from
// discrete states: the layered energy E1, the higher-order energy beta with
// companions Gamma and G, dual norms via the inverse Neumann-Laplace and
// Stokes operators, the Kronecker-identity residual, the difference
// functional Lambda, and empirical-constant scans for the inequality checks.

#include <vector>

#include "nschb/coefficients.hpp"
#include "nschb/fields.hpp"
#include "nschb/potential.hpp"
#include "nschb/solver_config.hpp"

namespace nschb {

struct EnergyReport {
    double t = 0.0;
    double kinetic = 0.0;        // 1/2 ||u||^2
    double interfacial = 0.0;    // 1/2 ||grad phi||^2
    double potential_int = 0.0;  // int W(phi)
    double e1 = 0.0;             // a*lambda0*(interfacial + potential_int) + kinetic
    double beta = 0.0;           // int nu|Du|^2 + 1/2||grad mu||^2 + 1/2||theta_t||^2 + (u.grad phi, mu)
    double grad_mu_sq = 0.0;
    double grad_u_sq = 0.0;
    // companions
    double gamma = 0.0;          // kappa_lo/2 ||grad theta_t||^2 + 1/4 ||grad phi_t||^2 + 1/2 ||u_t||^2
    double g_script = 0.0;       // ||grad u||^2 + ||phi||^2 + ||mu||_H1^2 + ||theta||_H1^2
    double theta_holder = 0.0;   // discrete C^beta seminorm of theta
};

EnergyReport energy_report(double t, const MACVectorField& u, const ScalarField& phi,
                           const ScalarField& mu, const ScalarField& theta,
                           const ScalarField& theta_t, const PotentialParams& pot,
                           const CoefficientModel& m, double holder_beta = 0.25);

// Fills the time-derivative companions (Gamma) from backward differences of
// two consecutive states.
void energy_report_companions(EnergyReport& r, const MACVectorField& u_prev,
                              const MACVectorField& u_cur, const ScalarField& phi_prev,
                              const ScalarField& phi_cur, const ScalarField& theta_prev,
                              const ScalarField& theta_cur, double dt,
                              const CoefficientModel& m);

// || f ||_{V0'} = || grad A0^{-1} f ||; f must be (discretely) mean-zero.
double v0prime_norm(const ScalarField& f, const SolverConfig& cfg);

// || g ||_{Vsigma'} = || grad S^{-1} g ||.
double vsigma_prime_norm(const MACVectorField& g, const SolverConfig& cfg);

// | (grad phi x grad phi, grad u) + (phi u, grad mu) | with mu recomputed
// from phi; vanishes for solenoidal u with impermeable walls.
double kronecker_residual(const ScalarField& phi, const MACVectorField& u,
                          const PotentialParams& pot);

// Lambda = ||u1-u2||_{Vsigma'}^2 + ||(phi1-phi2) - mean||_{V0'}^2 + ||theta1-theta2||^2.
double continuous_dependence_lambda(const MACVectorField& u1, const ScalarField& phi1,
                                    const ScalarField& theta1, const MACVectorField& u2,
                                    const ScalarField& phi2, const ScalarField& theta2,
                                    const SolverConfig& cfg);

struct InequalitySample {
    double korn_ratio = 0.0;     // ||grad u|| / ||D u||
    double h2_bound_ratio = 0.0;  // ||phi||_H2^2 / (||phi||^2 + (grad mu, grad phi)^+)
    double meanmu_ratio = 0.0;   // (|mean mu| + ||W'(phi)||_L1) / (1 + ||grad mu||)
    bool degenerate = false;
};

InequalitySample inequality_sample(const MACVectorField& u, const ScalarField& phi,
                                   const ScalarField& mu, const PotentialParams& pot);

// Running-max scan over states; also fits the best Holder/H2 interpolation
// exponent xi in (1/2, 1) for theta snapshots.
class InequalityScan {
  public:
    explicit InequalityScan(double gamma = 0.25) : gamma_(gamma) {
        if (!(gamma_ > 0.0 && gamma_ < 1.0))
            throw std::invalid_argument("InequalityScan: gamma must lie in (0,1)");
    }

    void add_state(const MACVectorField& u, const ScalarField& phi, const ScalarField& mu,
                   const PotentialParams& pot);
    void add_theta(const ScalarField& theta);

    double korn_max() const { return korn_max_; }
    double h2_bound_max() const { return h2_bound_max_; }
    double meanmu_max() const { return meanmu_max_; }
    // best exponent and constant for ||.||_{W^{1,4}} <= C ||.||_{C^gamma}^xi ||.||_{H2}^{1-xi}
    struct XiFit {
        double xi = 0.0;
        double constant = 0.0;
        bool valid = false;
    };
    XiFit interpolation_exponent_fit() const;

  private:
    double gamma_;
    double korn_max_ = 0.0, h2_bound_max_ = 0.0, meanmu_max_ = 0.0;
    std::vector<double> w14_, cgam_, h2_;
};

struct InvariantReport {
    double mass_drift = 0.0;
    double theta_max_excess = 0.0;
    double min_separation = 1.0;
    long energy_violations = 0;
    double divergence_max = 0.0;
};

// Streaming aggregation over a trajectory: deterministic given the states.
class InvariantAccumulator {
  public:
    // track_energy: count decoupled CH-energy increases (meaningful when the
    // velocity is off; pass false for coupled runs)
    InvariantAccumulator(const PotentialParams& pot, bool track_energy)
        : pot_(pot), track_energy_(track_energy) {}

    void observe(const MACVectorField& u, const ScalarField& phi, const ScalarField& theta);
    InvariantReport report() const { return rep_; }

  private:
    PotentialParams pot_;
    bool track_energy_;
    bool first_ = true;
    double mass0_ = 0.0, theta_max0_ = 0.0, energy_prev_ = 0.0;
    InvariantReport rep_;
};

}  // namespace nschb
