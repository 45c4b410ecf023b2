#pragma once
// Matrix-free Krylov drivers over raw arrays.

#include <cstddef>
#include <functional>

namespace nschb {

using ApplyFn = std::function<void(const double* x, double* y)>;

struct KrylovResult {
    int iters = 0;
    double rel_residual = 0.0;
    bool converged = false;
};

// Preconditioned conjugate gradient for SPD systems; M may be empty (identity).
// x is both the initial guess and the result.
KrylovResult pcg(std::size_t n, const ApplyFn& A, const ApplyFn& M, const double* b, double* x,
                 double rel_tol, int max_iter);

// Right-preconditioned BiCGStab for nonsymmetric systems.
KrylovResult bicgstab(std::size_t n, const ApplyFn& A, const ApplyFn& M, const double* b,
                      double* x, double rel_tol, int max_iter);

}  // namespace nschb
