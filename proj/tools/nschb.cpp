// nschb command-line driver: run / convergence / perturb / report.
// Exit codes: 0 success, 1 solver failure, 2 invariant violation.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nschb/sim.hpp"

namespace {

std::vector<int> parse_levels(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    nschb::SimConfig cfg = nschb::load_config(config_path);
    nschb::RunResult r = nschb::run(cfg, out_dir);
    std::printf("steps=%ld wall=%.2fs mass_drift=%.3e theta_excess=%.3e min_sep=%.4f div=%.3e\n",
                r.steps, r.wall_seconds, r.invariants.mass_drift,
                r.invariants.theta_max_excess, r.invariants.min_separation,
                r.invariants.divergence_max);
    if (r.exit_code != 0) std::fprintf(stderr, "nschb run: %s\n", r.error.c_str());
    return r.exit_code;
}

int cmd_convergence(const std::string& config_path, const std::string& levels_str,
                    const std::string& target) {
    nschb::SimConfig cfg = nschb::load_config(config_path);
    std::vector<int> levels = parse_levels(levels_str);
    nschb::ConvergenceTable t = nschb::convergence_study(cfg, levels, target);
    std::printf("target=%s\n%-8s %-12s %-14s %-8s\n", t.target.c_str(), "n", "dt", "error",
                "order");
    for (const auto& r : t.rows)
        std::printf("%-8d %-12.4e %-14.6e %-8.3f\n", r.n, r.dt, r.error, r.order);
    std::printf("fitted order: %.3f\n", t.fitted_order);
    return 0;
}

int cmd_perturb(const std::string& config_path, double eps, double t_end,
                const std::string& out_dir) {
    nschb::SimConfig cfg = nschb::load_config(config_path);
    nschb::PerturbationResult r = nschb::perturbation_experiment(cfg, eps, t_end);
    std::printf("lambda(0)=%.6e lambda(T)=%.6e amplification=%.4f\n", r.lambda.front(),
                r.lambda.back(), r.amplification);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        std::ofstream f(out_dir + "/lambda.csv");
        f << "t,lambda\n";
        char buf[64];
        for (std::size_t i = 0; i < r.times.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.times[i], r.lambda[i]);
            f << buf;
        }
    }
    return 0;
}

int cmd_report(const std::string& out_dir) {
    // re-summarize an existing run directory from its CSV series
    std::ifstream inv(out_dir + "/invariants.csv");
    if (!inv) {
        std::fprintf(stderr, "nschb report: no invariants.csv under %s\n", out_dir.c_str());
        return 1;
    }
    std::string line, last;
    std::getline(inv, line);  // header
    while (std::getline(inv, line))
        if (!line.empty()) last = line;
    if (last.empty()) {
        std::fprintf(stderr, "nschb report: empty invariants.csv\n");
        return 1;
    }
    double t, mass, excess, sep, divmax;
    long viol;
    if (std::sscanf(last.c_str(), "%lf,%lf,%lf,%lf,%ld,%lf", &t, &mass, &excess, &sep, &viol,
                    &divmax) != 6) {
        std::fprintf(stderr, "nschb report: malformed invariants.csv row\n");
        return 1;
    }
    std::printf("t=%.6g mass_drift=%.3e theta_excess=%.3e min_sep=%.4f violations=%ld div=%.3e\n",
                t, mass, excess, sep, viol, divmax);

    std::ifstream jf(out_dir + "/run.json");
    if (jf) {
        nlohmann::json j = nlohmann::json::parse(jf, nullptr, false);
        if (!j.is_discarded() && j.contains("summary")) {
            j["summary"]["resummarized"] = true;
            std::ofstream out(out_dir + "/run.json");
            out << j.dump(2) << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Navier-Stokes-Cahn-Hilliard-Boussinesq desk-scale simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, levels = "32,64,128", target = "heat";
    double eps = 1e-3, t_end = 0.25;

    CLI::App* runc = app.add_subcommand("run", "run a configured simulation");
    runc->add_option("--config", config_path, "TOML config path")->required();
    runc->add_option("--out", out_dir, "output directory");

    CLI::App* conv = app.add_subcommand("convergence", "grid/time refinement study");
    conv->add_option("--config", config_path, "TOML config path")->required();
    conv->add_option("--levels", levels, "comma-separated grid sizes");
    conv->add_option("--target", target, "heat | ch | coupled-time");

    CLI::App* pert = app.add_subcommand("perturb", "twin-run continuous-dependence experiment");
    pert->add_option("--config", config_path, "TOML config path")->required();
    pert->add_option("--eps", eps, "perturbation size");
    pert->add_option("--t-end", t_end, "horizon T");
    pert->add_option("--out", out_dir, "output directory");

    CLI::App* rep = app.add_subcommand("report", "re-summarize an existing run directory");
    rep->add_option("--out", out_dir, "run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (runc->parsed()) return cmd_run(config_path, out_dir);
        if (conv->parsed()) return cmd_convergence(config_path, levels, target);
        if (pert->parsed()) return cmd_perturb(config_path, eps, t_end, out_dir);
        if (rep->parsed()) return cmd_report(out_dir);
    } catch (const nschb::SolverError& e) {
        std::fprintf(stderr, "nschb: solver failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nschb: %s\n", e.what());
        return 1;
    }
    return 0;
}
