// Scalar reference kernels. These define the semantics the SIMD variants must
// reproduce; reductions use blocked pairwise summation (block 1024, binary
// combine) so both paths share the same block-level accumulation tree.

#include "nschb/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace nschb::kern {

namespace {

constexpr std::size_t kBlock = 1024;

template <typename BlockFn>
double pairwise_reduce(std::size_t n, BlockFn block) {
    // Reduce [0,n) in blocks of kBlock, combining partial sums pairwise.
    double stack[64];
    int top = 0;
    std::size_t nblocks = 0;
    for (std::size_t off = 0; off < n; off += kBlock) {
        std::size_t len = (n - off < kBlock) ? (n - off) : kBlock;
        double s = block(off, len);
        ++nblocks;
        // merge equal-weight partials, as in binary counter addition
        std::size_t m = nblocks;
        stack[top++] = s;
        while ((m & 1u) == 0u) {
            double b = stack[--top];
            double a = stack[--top];
            stack[top++] = a + b;
            m >>= 1u;
        }
    }
    double total = 0.0;
    for (int k = 0; k < top; ++k) total += stack[k];
    return total;
}

double s_dot(const double* x, const double* y, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[off + i] * y[off + i];
        return s;
    });
}

double s_nrm2sq(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[off + i] * x[off + i];
        return s;
    });
}

double s_sum(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += x[off + i];
        return s;
    });
}

double s_sum_abs(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) s += std::fabs(x[off + i]);
        return s;
    });
}

double s_sum_pow4(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        double s = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            double v = x[off + i] * x[off + i];
            s += v * v;
        }
        return s;
    });
}

double s_max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > m) m = v;
    }
    return m;
}

double s_vmin(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] < m) m = x[i];
    return m;
}

double s_vmax(const double* x, std::size_t n) {
    double m = x[0];
    for (std::size_t i = 1; i < n; ++i)
        if (x[i] > m) m = x[i];
    return m;
}

void s_axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void s_xpby(const double* x, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void s_scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void s_triad(double* z, double a, const double* x, double b, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void s_vmul(double* z, const double* x, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void s_stencil5(double* out, const double* in, std::size_t nx, std::size_t ny, double cc,
                double cx, double cy) {
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double* row = in + j * nx;
        const double* rowm = row - nx;
        const double* rowp = row + nx;
        double* orow = out + j * nx;
        for (std::size_t i = 1; i + 1 < nx; ++i) {
            orow[i] = cc * row[i] + cx * (row[i - 1] + row[i + 1]) + cy * (rowm[i] + rowp[i]);
        }
    }
}

}  // namespace

const KernelOps& scalar_kernels() {
    static const KernelOps ops = {
        "scalar", s_dot,  s_nrm2sq, s_sum,   s_sum_abs, s_sum_pow4, s_max_abs, s_vmin,
        s_vmax,   s_axpy, s_xpby,   s_scale, s_triad,   s_vmul,     s_stencil5,
    };
    return ops;
}

}  // namespace nschb::kern
