#include "urlab/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>

namespace urlab::kernels {
namespace {

// One __m256d holds two interleaved complex numbers [re0, im0, re1, im1].

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

cplx cdot_avx2(std::span<const cplx> a, std::span<const cplx> b) {
    const auto* pa = reinterpret_cast<const double*>(a.data());
    const auto* pb = reinterpret_cast<const double*>(b.data());
    const std::size_t n = a.size();

    // rr accumulates [ar*br, ai*bi]; ri accumulates [ar*bi, ai*br].
    __m256d rr0 = _mm256_setzero_pd(), rr1 = _mm256_setzero_pd();
    __m256d ri0 = _mm256_setzero_pd(), ri1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va0 = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb0 = _mm256_loadu_pd(pb + 2 * i);
        const __m256d va1 = _mm256_loadu_pd(pa + 2 * i + 4);
        const __m256d vb1 = _mm256_loadu_pd(pb + 2 * i + 4);
        rr0 = _mm256_fmadd_pd(va0, vb0, rr0);
        rr1 = _mm256_fmadd_pd(va1, vb1, rr1);
        ri0 = _mm256_fmadd_pd(va0, _mm256_permute_pd(vb0, 0b0101), ri0);
        ri1 = _mm256_fmadd_pd(va1, _mm256_permute_pd(vb1, 0b0101), ri1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        rr0 = _mm256_fmadd_pd(va, vb, rr0);
        ri0 = _mm256_fmadd_pd(va, _mm256_permute_pd(vb, 0b0101), ri0);
    }
    const __m256d rr = _mm256_add_pd(rr0, rr1);
    // Negate the odd lanes of ri so a plain horizontal sum gives ar*bi - ai*br.
    const __m256d sign = _mm256_setr_pd(0.0, -0.0, 0.0, -0.0);
    const __m256d ri = _mm256_xor_pd(_mm256_add_pd(ri0, ri1), sign);
    double re = hsum(rr);
    double im = hsum(ri);
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

inline __m256d cmul_bcast(__m256d xr, __m256d xi, __m256d v) {
    // [xr*vr - xi*vi, xr*vi + xi*vr]
    return _mm256_fmaddsub_pd(xr, v, _mm256_mul_pd(xi, _mm256_permute_pd(v, 0b0101)));
}

void axpy_avx2(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    const auto* px = reinterpret_cast<const double*>(x.data());
    auto* py = reinterpret_cast<double*>(y.data());
    const std::size_t n = x.size();
    const __m256d xr = _mm256_set1_pd(alpha.real());
    const __m256d xi = _mm256_set1_pd(alpha.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d v = _mm256_loadu_pd(px + 2 * i);
        const __m256d acc = _mm256_loadu_pd(py + 2 * i);
        _mm256_storeu_pd(py + 2 * i, _mm256_add_pd(acc, cmul_bcast(xr, xi, v)));
    }
    for (; i < n; ++i) {
        const double cr = x[i].real(), ci = x[i].imag();
        y[i] = {y[i].real() + alpha.real() * cr - alpha.imag() * ci,
                y[i].imag() + alpha.real() * ci + alpha.imag() * cr};
    }
}

void gemv_avx2(const cplx* a, std::size_t rows, std::size_t cols,
               std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
    auto* py = reinterpret_cast<double*>(y.data());
    std::size_t j = 0;
    // Two columns per pass halves the traffic on y.
    for (; j + 2 <= cols; j += 2) {
        const auto* c0 = reinterpret_cast<const double*>(a + j * rows);
        const auto* c1 = reinterpret_cast<const double*>(a + (j + 1) * rows);
        const __m256d x0r = _mm256_set1_pd(x[j].real()), x0i = _mm256_set1_pd(x[j].imag());
        const __m256d x1r = _mm256_set1_pd(x[j + 1].real()), x1i = _mm256_set1_pd(x[j + 1].imag());
        std::size_t i = 0;
        for (; i + 2 <= rows; i += 2) {
            __m256d acc = _mm256_loadu_pd(py + 2 * i);
            acc = _mm256_add_pd(acc, cmul_bcast(x0r, x0i, _mm256_loadu_pd(c0 + 2 * i)));
            acc = _mm256_add_pd(acc, cmul_bcast(x1r, x1i, _mm256_loadu_pd(c1 + 2 * i)));
            _mm256_storeu_pd(py + 2 * i, acc);
        }
        for (; i < rows; ++i) {
            y[i] += x[j] * a[j * rows + i] + x[j + 1] * a[(j + 1) * rows + i];
        }
    }
    for (; j < cols; ++j) {
        axpy_avx2(x[j], std::span<const cplx>(a + j * rows, rows), y);
    }
}

}  // namespace

const KernelTable* avx2_table() noexcept {
    static const KernelTable table{"avx2", &cdot_avx2, &gemv_avx2, &axpy_avx2};
    return &table;
}

}  // namespace urlab::kernels

#else

namespace urlab::kernels {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace urlab::kernels

#endif
