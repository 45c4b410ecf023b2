#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "nschb/sim.hpp"

namespace nschb {

namespace {

// Minimal TOML subset: [section] headers, key = value scalars (number, bool,
// "string"), # comments. Enough for the run configs; no arrays or nesting.
class Toml {
  public:
    static Toml parse(const std::string& text) {
        Toml t;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip(line);
            if (s.empty() || s[0] == '#') continue;
            if (s.front() == '[') {
                auto close = s.find(']');
                if (close == std::string::npos)
                    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                ": unterminated section header");
                section = strip(s.substr(1, close - 1));
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": expected key = value");
            std::string key = strip(s.substr(0, eq));
            std::string val = strip(s.substr(eq + 1));
            // trailing comment (outside quotes)
            bool quoted = !val.empty() && val.front() == '"';
            if (!quoted) {
                auto hash = val.find('#');
                if (hash != std::string::npos) val = strip(val.substr(0, hash));
            } else {
                auto endq = val.find('"', 1);
                if (endq == std::string::npos)
                    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                ": unterminated string");
                val = val.substr(1, endq - 1);
            }
            t.values_[section + "." + key] = val;
        }
        return t;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    double number(const std::string& key, double fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size())
            throw std::invalid_argument("config key " + key + ": not a number");
        return v;
    }

    int integer(const std::string& key, int fallback) const {
        return static_cast<int>(number(key, fallback));
    }

    bool boolean(const std::string& key, bool fallback) const {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        if (it->second == "true") return true;
        if (it->second == "false") return false;
        throw std::invalid_argument("config key " + key + ": expected true/false");
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

  private:
    static std::string strip(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    std::map<std::string, std::string> values_;
};

ConvectionScheme scheme_from(const std::string& s, const std::string& key) {
    if (s == "upwind") return ConvectionScheme::Upwind;
    if (s == "centered") return ConvectionScheme::Centered;
    throw std::invalid_argument("config key " + key + ": unknown scheme '" + s + "'");
}

void apply_preset(InitialSpec& init) {
    if (init.preset == "zero" || init.preset == "custom") return;
    if (init.preset == "weak_data") {
        init.phi_profile = "random";
        init.phi_amplitude = 0.05;
        init.theta_profile = "bump";
        init.theta_amplitude = 0.5;
        init.u_profile = "zero";
        return;
    }
    if (init.preset == "strong_data") {
        init.phi_profile = "cosine";
        init.phi_amplitude = 0.9;
        init.theta_profile = "bump";
        init.theta_amplitude = 0.5;
        init.u_profile = "zero";
        return;
    }
    throw std::invalid_argument("config: unknown initial preset '" + init.preset + "'");
}

}  // namespace

void SimConfig::validate() const {
    Grid g(nx, ny, lx, ly);  // checks nx, ny >= 4 and positive extents
    (void)g;
    if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
    if (!(t_end >= dt)) throw std::invalid_argument("config: t_end must be >= dt");
    if (report_interval < 1) throw std::invalid_argument("config: report_interval must be >= 1");
    potential.validate();
    solvers.validate();
    ch.newton.validate();
    ns.linear.validate();
    if (mode == SimMode::Galerkin && (galerkin_m < 1 || galerkin_m > 64))
        throw std::invalid_argument("config: galerkin m out of range");
}

SimConfig config_from_string(const std::string& text) {
    Toml t = Toml::parse(text);
    SimConfig c;
    c.nx = t.integer("grid.nx", c.nx);
    c.ny = t.integer("grid.ny", c.ny);
    c.lx = t.number("grid.lx", c.lx);
    c.ly = t.number("grid.ly", c.ly);

    c.dt = t.number("time.dt", c.dt);
    c.t_end = t.number("time.t_end", c.t_end);
    c.snapshot_interval = t.number("time.snapshot_interval", c.snapshot_interval);
    c.report_interval = t.integer("time.report_interval", c.report_interval);

    c.potential = PotentialParams(t.number("potential.A", 1.0), t.number("potential.B", 2.0));

    c.coefficients.nu0 = t.number("coefficients.nu0", c.coefficients.nu0);
    c.coefficients.nu1 = t.number("coefficients.nu1", c.coefficients.nu1);
    c.coefficients.kappa0 = t.number("coefficients.kappa0", c.coefficients.kappa0);
    c.coefficients.kappa1 = t.number("coefficients.kappa1", c.coefficients.kappa1);
    c.coefficients.lambda0 = t.number("coefficients.lambda0", c.coefficients.lambda0);
    c.coefficients.a = t.number("coefficients.a", c.coefficients.a);
    c.coefficients.b = t.number("coefficients.b", c.coefficients.b);
    c.coefficients.theta_max = t.number("coefficients.theta_max", c.coefficients.theta_max);
    c.coefficients.finalize();

    c.physics.Ra = t.number("physics.Ra", c.physics.Ra);
    c.physics.Ga = t.number("physics.Ga", c.physics.Ga);
    c.physics.g = t.number("physics.g", c.physics.g);

    c.solvers.rel_tol = t.number("solvers.rel_tol", c.solvers.rel_tol);
    c.solvers.max_iter = t.integer("solvers.max_iter", c.solvers.max_iter);
    std::string method = t.text("solvers.method", "cg");
    if (method == "cg") c.solvers.method = SolverConfig::Method::ConjugateGradient;
    else if (method == "multigrid") c.solvers.method = SolverConfig::Method::Multigrid;
    else throw std::invalid_argument("config: solvers.method must be cg or multigrid");

    c.ch.newton.rel_tol = t.number("cahn_hilliard.newton_rel_tol", c.solvers.rel_tol);
    c.ch.newton.max_iter = t.integer("cahn_hilliard.newton_max_iter", 50);
    c.ch.newton.method = c.solvers.method;
    c.ch.scheme = scheme_from(t.text("cahn_hilliard.scheme", "upwind"), "cahn_hilliard.scheme");
    bool decoupled = t.boolean("cahn_hilliard.decoupled", false);

    c.theta_scheme = scheme_from(t.text("boussinesq.scheme", "upwind"), "boussinesq.scheme");

    std::string visc = t.text("navier_stokes.viscous_treatment", "semi_implicit");
    if (visc == "semi_implicit") c.ns.viscous = NSStepConfig::ViscousTreatment::SemiImplicit;
    else if (visc == "explicit") c.ns.viscous = NSStepConfig::ViscousTreatment::Explicit;
    else throw std::invalid_argument("config: navier_stokes.viscous_treatment invalid");
    c.ns.linear = c.solvers;
    c.ns.linear.rel_tol = t.number("navier_stokes.rel_tol", c.solvers.rel_tol);

    c.galerkin_enabled = t.boolean("galerkin.enabled", false);
    c.galerkin_m = t.integer("galerkin.m", c.galerkin_m);
    c.mode = c.galerkin_enabled ? SimMode::Galerkin
                                : (decoupled ? SimMode::DecoupledCH : SimMode::Full);

    c.initial.preset = t.text("initial.preset", c.initial.preset);
    apply_preset(c.initial);
    c.initial.phi_profile = t.text("initial.phi_profile", c.initial.phi_profile);
    c.initial.phi_amplitude = t.number("initial.phi_amplitude", c.initial.phi_amplitude);
    c.initial.phi_mean = t.number("initial.phi_mean", c.initial.phi_mean);
    c.initial.phi_seed = static_cast<unsigned>(t.integer("initial.phi_seed", 1234));
    c.initial.theta_profile = t.text("initial.theta_profile", c.initial.theta_profile);
    c.initial.theta_amplitude = t.number("initial.theta_amplitude", c.initial.theta_amplitude);
    c.initial.u_profile = t.text("initial.u_profile", c.initial.u_profile);
    c.initial.u_amplitude = t.number("initial.u_amplitude", c.initial.u_amplitude);
    c.initial.phi_file = t.text("initial.phi_file", "");
    c.initial.theta_file = t.text("initial.theta_file", "");
    c.initial.ux_file = t.text("initial.ux_file", "");
    c.initial.uy_file = t.text("initial.uy_file", "");

    c.write_snapshots = t.boolean("output.snapshots", true);
    c.mass_tol = t.number("output.mass_tol", c.mass_tol);
    c.theta_excess_tol = t.number("output.theta_excess_tol", c.theta_excess_tol);
    c.divergence_tol = t.number("output.divergence_tol", c.divergence_tol);

    c.validate();
    return c;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_string(ss.str());
}

}  // namespace nschb
