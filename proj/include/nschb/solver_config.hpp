#pragma once

#include <stdexcept>
#include <string>

namespace nschb {

struct SolverConfig {
    enum class Method { ConjugateGradient, Multigrid };

    double rel_tol = 1e-10;
    int max_iter = 500;
    Method method = Method::ConjugateGradient;

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-4))
            throw std::invalid_argument("SolverConfig: rel_tol must lie in (0, 1e-4]");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
    }
};

class SolverError : public std::runtime_error {
  public:
    SolverError(const std::string& what, double residual, int iters)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iters) + " iterations)"),
          residual_(residual),
          iters_(iters) {}
    double residual() const { return residual_; }
    int iterations() const { return iters_; }

  private:
    double residual_;
    int iters_;
};

class CompatibilityError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace nschb
