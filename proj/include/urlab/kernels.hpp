#pragma once

// Complex double-precision inner loops used by Gram and moment evaluation.
//
// Every kernel has a portable scalar reference and an AVX2+FMA variant; the
// variant is chosen once at startup from CPUID. URLAB_KERNEL=scalar in the
// environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace urlab::kernels {

using cplx = std::complex<double>;

/// <a|b> = sum conj(a_i) b_i
using CdotFn = cplx (*)(std::span<const cplx> a, std::span<const cplx> b);
/// y = A x for a column-major rows x cols matrix.
using GemvFn = void (*)(const cplx* a, std::size_t rows, std::size_t cols,
                        std::span<const cplx> x, std::span<cplx> y);
/// y += alpha x
using AxpyFn = void (*)(cplx alpha, std::span<const cplx> x, std::span<cplx> y);

struct KernelTable {
    std::string_view name;
    CdotFn cdot;
    GemvFn gemv;
    AxpyFn axpy;
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the AVX2 translation unit is not built for this target.
const KernelTable* avx2_table() noexcept;

bool cpu_has_avx2_fma() noexcept;

/// The table selected for this process.
const KernelTable& active() noexcept;

inline cplx cdot(std::span<const cplx> a, std::span<const cplx> b) {
    return active().cdot(a, b);
}

inline void gemv(const cplx* a, std::size_t rows, std::size_t cols,
                 std::span<const cplx> x, std::span<cplx> y) {
    active().gemv(a, rows, cols, x, y);
}

inline void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    active().axpy(alpha, x, y);
}

}  // namespace urlab::kernels
