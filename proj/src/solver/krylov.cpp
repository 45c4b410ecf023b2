#include "nschb/krylov.hpp"

#include <cmath>
#include <cstring>
#include <vector>

#include "nschb/kernels.hpp"

namespace nschb {

KrylovResult pcg(std::size_t n, const ApplyFn& A, const ApplyFn& M, const double* b, double* x,
                 double rel_tol, int max_iter) {
    const auto& k = kern::kernels();
    std::vector<double> r(n), z(n), p(n), Ap(n);

    A(x, Ap.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    double bnorm = std::sqrt(k.nrm2sq(b, n));
    if (bnorm == 0.0) bnorm = 1.0;

    auto precond = [&](const double* in, double* out) {
        if (M) M(in, out);
        else std::memcpy(out, in, n * sizeof(double));
    };

    precond(r.data(), z.data());
    std::memcpy(p.data(), z.data(), n * sizeof(double));
    double rz = k.dot(r.data(), z.data(), n);
    double rnorm = std::sqrt(k.nrm2sq(r.data(), n));

    KrylovResult res;
    res.rel_residual = rnorm / bnorm;
    if (res.rel_residual <= rel_tol) {
        res.converged = true;
        return res;
    }

    for (int it = 0; it < max_iter; ++it) {
        A(p.data(), Ap.data());
        double pAp = k.dot(p.data(), Ap.data(), n);
        if (pAp <= 0.0) break;  // lost positive definiteness, report as-is
        double alpha = rz / pAp;
        k.axpy(alpha, p.data(), x, n);
        k.axpy(-alpha, Ap.data(), r.data(), n);
        rnorm = std::sqrt(k.nrm2sq(r.data(), n));
        res.iters = it + 1;
        res.rel_residual = rnorm / bnorm;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        precond(r.data(), z.data());
        double rz_new = k.dot(r.data(), z.data(), n);
        double beta = rz_new / rz;
        rz = rz_new;
        k.xpby(z.data(), beta, p.data(), n);
    }
    return res;
}

KrylovResult bicgstab(std::size_t n, const ApplyFn& A, const ApplyFn& M, const double* b,
                      double* x, double rel_tol, int max_iter) {
    const auto& k = kern::kernels();
    std::vector<double> r(n), r0(n), p(n), v(n), s(n), t(n), y(n), z(n);

    A(x, v.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - v[i];
    std::memcpy(r0.data(), r.data(), n * sizeof(double));
    double bnorm = std::sqrt(k.nrm2sq(b, n));
    if (bnorm == 0.0) bnorm = 1.0;

    auto precond = [&](const double* in, double* out) {
        if (M) M(in, out);
        else std::memcpy(out, in, n * sizeof(double));
    };

    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);

    KrylovResult res;
    res.rel_residual = std::sqrt(k.nrm2sq(r.data(), n)) / bnorm;
    if (res.rel_residual <= rel_tol) {
        res.converged = true;
        return res;
    }

    for (int it = 0; it < max_iter; ++it) {
        double rho_new = k.dot(r0.data(), r.data(), n);
        if (rho_new == 0.0) break;
        double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        // p = r + beta (p - omega v)
        k.axpy(-omega, v.data(), p.data(), n);
        k.xpby(r.data(), beta, p.data(), n);
        precond(p.data(), y.data());
        A(y.data(), v.data());
        double r0v = k.dot(r0.data(), v.data(), n);
        if (r0v == 0.0) break;
        alpha = rho / r0v;
        std::memcpy(s.data(), r.data(), n * sizeof(double));
        k.axpy(-alpha, v.data(), s.data(), n);
        double snorm = std::sqrt(k.nrm2sq(s.data(), n));
        if (snorm / bnorm <= rel_tol) {
            k.axpy(alpha, y.data(), x, n);
            res.iters = it + 1;
            res.rel_residual = snorm / bnorm;
            res.converged = true;
            return res;
        }
        precond(s.data(), z.data());
        A(z.data(), t.data());
        double tt = k.nrm2sq(t.data(), n);
        if (tt == 0.0) break;
        omega = k.dot(t.data(), s.data(), n) / tt;
        k.axpy(alpha, y.data(), x, n);
        k.axpy(omega, z.data(), x, n);
        std::memcpy(r.data(), s.data(), n * sizeof(double));
        k.axpy(-omega, t.data(), r.data(), n);
        res.iters = it + 1;
        res.rel_residual = std::sqrt(k.nrm2sq(r.data(), n)) / bnorm;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            return res;
        }
        if (omega == 0.0) break;
    }
    return res;
}

}  // namespace nschb
