#include "urlab/kernels.hpp"

namespace urlab::kernels {
namespace {

// Real/imaginary parts are handled explicitly: std::complex multiplication
// goes through the C99 Annex G NaN recovery path, which we never need here.

cplx cdot_scalar(std::span<const cplx> a, std::span<const cplx> b) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

void axpy_scalar(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
    const double xr = alpha.real(), xi = alpha.imag();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double cr = x[i].real(), ci = x[i].imag();
        y[i] = {y[i].real() + xr * cr - xi * ci, y[i].imag() + xr * ci + xi * cr};
    }
}

void gemv_scalar(const cplx* a, std::size_t rows, std::size_t cols,
                 std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t i = 0; i < rows; ++i) y[i] = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
        axpy_scalar(x[j], std::span<const cplx>(a + j * rows, rows), y);
    }
}

}  // namespace

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{"scalar", &cdot_scalar, &gemv_scalar, &axpy_scalar};
    return table;
}

}  // namespace urlab::kernels
