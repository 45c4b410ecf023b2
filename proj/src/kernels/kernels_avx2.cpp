// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma in its own translation
// unit; callers reach it only through the dispatch table after a runtime CPU
// check. Reductions use four lane accumulators inside each 1024-element block
// and the same pairwise block combine as the scalar path.

#include "nschb/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>
#include <cstddef>

namespace nschb::kern {

namespace {

constexpr std::size_t kBlock = 1024;

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

template <typename BlockFn>
double pairwise_reduce(std::size_t n, BlockFn block) {
    double stack[64];
    int top = 0;
    std::size_t nblocks = 0;
    for (std::size_t off = 0; off < n; off += kBlock) {
        std::size_t len = (n - off < kBlock) ? (n - off) : kBlock;
        double s = block(off, len);
        ++nblocks;
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

double v_dot(const double* x, const double* y, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        const double* xo = x + off;
        const double* yo = y + off;
        __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 16 <= len; i += 16) {
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(xo + i), _mm256_loadu_pd(yo + i), a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(xo + i + 4), _mm256_loadu_pd(yo + i + 4), a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(xo + i + 8), _mm256_loadu_pd(yo + i + 8), a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(xo + i + 12), _mm256_loadu_pd(yo + i + 12), a3);
        }
        for (; i + 4 <= len; i += 4)
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(xo + i), _mm256_loadu_pd(yo + i), a0);
        double s = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
        for (; i < len; ++i) s += xo[i] * yo[i];
        return s;
    });
}

double v_nrm2sq(const double* x, std::size_t n) { return v_dot(x, x, n); }

double v_sum(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        const double* xo = x + off;
        __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 8 <= len; i += 8) {
            a0 = _mm256_add_pd(a0, _mm256_loadu_pd(xo + i));
            a1 = _mm256_add_pd(a1, _mm256_loadu_pd(xo + i + 4));
        }
        for (; i + 4 <= len; i += 4) a0 = _mm256_add_pd(a0, _mm256_loadu_pd(xo + i));
        double s = hsum(_mm256_add_pd(a0, a1));
        for (; i < len; ++i) s += xo[i];
        return s;
    });
}

double v_sum_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        const double* xo = x + off;
        __m256d a0 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= len; i += 4)
            a0 = _mm256_add_pd(a0, _mm256_and_pd(mask, _mm256_loadu_pd(xo + i)));
        double s = hsum(a0);
        for (; i < len; ++i) s += std::fabs(xo[i]);
        return s;
    });
}

double v_sum_pow4(const double* x, std::size_t n) {
    return pairwise_reduce(n, [&](std::size_t off, std::size_t len) {
        const double* xo = x + off;
        __m256d a0 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= len; i += 4) {
            __m256d v = _mm256_loadu_pd(xo + i);
            __m256d v2 = _mm256_mul_pd(v, v);
            a0 = _mm256_fmadd_pd(v2, v2, a0);
        }
        double s = hsum(a0);
        for (; i < len; ++i) {
            double v = xo[i] * xo[i];
            s += v * v;
        }
        return s;
    });
}

double v_max_abs(const double* x, std::size_t n) {
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d m = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        m = _mm256_max_pd(m, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
    double r = 0.0;
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, m);
    for (double v : lanes)
        if (v > r) r = v;
    for (; i < n; ++i) {
        double v = std::fabs(x[i]);
        if (v > r) r = v;
    }
    return r;
}

double v_vmin(const double* x, std::size_t n) {
    std::size_t i = 0;
    double r = x[0];
    if (n >= 4) {
        __m256d m = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) m = _mm256_min_pd(m, _mm256_loadu_pd(x + i));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, m);
        r = lanes[0];
        for (int k = 1; k < 4; ++k)
            if (lanes[k] < r) r = lanes[k];
    } else {
        i = 1;
    }
    for (; i < n; ++i)
        if (x[i] < r) r = x[i];
    return r;
}

double v_vmax(const double* x, std::size_t n) {
    std::size_t i = 0;
    double r = x[0];
    if (n >= 4) {
        __m256d m = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) m = _mm256_max_pd(m, _mm256_loadu_pd(x + i));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, m);
        r = lanes[0];
        for (int k = 1; k < 4; ++k)
            if (lanes[k] > r) r = lanes[k];
    } else {
        i = 1;
    }
    for (; i < n; ++i)
        if (x[i] > r) r = x[i];
    return r;
}

void v_axpy(double a, const double* x, double* y, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(
            y + i + 4,
            _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void v_xpby(const double* x, double b, double* y, std::size_t n) {
    __m256d bv = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(bv, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] + b * y[i];
}

void v_scale(double a, double* x, std::size_t n) {
    __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void v_triad(double* z, double a, const double* x, double b, const double* y, std::size_t n) {
    __m256d av = _mm256_set1_pd(a), bv = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_mul_pd(bv, _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(z + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), t));
    }
    for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void v_vmul(double* z, const double* x, const double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void v_stencil5(double* out, const double* in, std::size_t nx, std::size_t ny, double cc,
                double cx, double cy) {
    __m256d ccv = _mm256_set1_pd(cc), cxv = _mm256_set1_pd(cx), cyv = _mm256_set1_pd(cy);
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const double* row = in + j * nx;
        const double* rowm = row - nx;
        const double* rowp = row + nx;
        double* orow = out + j * nx;
        std::size_t i = 1;
        for (; i + 4 <= nx - 1; i += 4) {
            __m256d c = _mm256_loadu_pd(row + i);
            __m256d w = _mm256_loadu_pd(row + i - 1);
            __m256d e = _mm256_loadu_pd(row + i + 1);
            __m256d s = _mm256_loadu_pd(rowm + i);
            __m256d nn = _mm256_loadu_pd(rowp + i);
            __m256d r = _mm256_mul_pd(ccv, c);
            r = _mm256_fmadd_pd(cxv, _mm256_add_pd(w, e), r);
            r = _mm256_fmadd_pd(cyv, _mm256_add_pd(s, nn), r);
            _mm256_storeu_pd(orow + i, r);
        }
        for (; i + 1 < nx; ++i)
            orow[i] = cc * row[i] + cx * (row[i - 1] + row[i + 1]) + cy * (rowm[i] + rowp[i]);
    }
}

}  // namespace

const KernelOps* avx2_kernels() {
    static const KernelOps ops = {
        "avx2", v_dot,  v_nrm2sq, v_sum,   v_sum_abs, v_sum_pow4, v_max_abs, v_vmin,
        v_vmax, v_axpy, v_xpby,   v_scale, v_triad,   v_vmul,     v_stencil5,
    };
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return &ops;
    return nullptr;
}

}  // namespace nschb::kern

#else

namespace nschb::kern {
const KernelOps* avx2_kernels() { return nullptr; }
}  // namespace nschb::kern

#endif
