#pragma once
// Low-level array kernels behind the field operations and Krylov solvers.
//
// Every kernel has a scalar reference implementation and, on x86-64 with AVX2
// and FMA, a vectorized variant. The active set is chosen once at startup from
// the CPU and the NSCHB_SIMD environment variable ("scalar", "avx2", "auto").
// The two paths are equivalence-tested against each other; reductions use
// pairwise (blocked) summation in both so the accumulation error stays
// O(log n) and runs on the same machine are bit-reproducible.

#include <cstddef>
#include <string>

namespace nschb::kern {

struct KernelOps {
    const char* name;

    // reductions
    double (*dot)(const double* x, const double* y, std::size_t n);
    double (*nrm2sq)(const double* x, std::size_t n);
    double (*sum)(const double* x, std::size_t n);
    double (*sum_abs)(const double* x, std::size_t n);
    double (*sum_pow4)(const double* x, std::size_t n);
    double (*max_abs)(const double* x, std::size_t n);
    double (*vmin)(const double* x, std::size_t n);
    double (*vmax)(const double* x, std::size_t n);

    // elementwise updates
    void (*axpy)(double a, const double* x, double* y, std::size_t n);          // y += a*x
    void (*xpby)(const double* x, double b, double* y, std::size_t n);          // y = x + b*y
    void (*scale)(double a, double* x, std::size_t n);
    void (*triad)(double* z, double a, const double* x, double b, const double* y,
                  std::size_t n);                                               // z = a*x + b*y
    void (*vmul)(double* z, const double* x, const double* y, std::size_t n);   // z = x.*y

    // interior 5-point stencil on a row-major (nx x ny) array:
    //   out[j*nx+i] = cc*in[j*nx+i] + cx*(in[..i-1]+in[..i+1]) + cy*(in[..j-1]+in[..j+1])
    // for i in [1,nx-2], j in [1,ny-2]. Edge rows/columns are the caller's job.
    void (*stencil5)(double* out, const double* in, std::size_t nx, std::size_t ny,
                     double cc, double cx, double cy);
};

// Active kernel set (resolved once; honors NSCHB_SIMD).
const KernelOps& kernels();

// Always-available scalar reference set.
const KernelOps& scalar_kernels();

// AVX2 set, or nullptr when the build or the CPU lacks it.
const KernelOps* avx2_kernels();

// Force a specific set ("scalar", "avx2", "auto"). Throws std::invalid_argument
// on unknown names or when the requested set is unavailable. Test hook; not
// thread-safe against concurrent kernel users.
void force_isa(const std::string& name);

// Name of the active set ("scalar" or "avx2").
const char* active_isa();

}  // namespace nschb::kern
