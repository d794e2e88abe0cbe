#include "urlab/matrix_kernel.hpp"

#include "urlab/errors.hpp"
#include "urlab/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace urlab {
namespace {

constexpr int kMinorRouteMaxDim = 8;
constexpr int kMaxCharDim = 32;

bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

// Determinant of the principal submatrix selected by `mask`, by Gaussian
// elimination with partial pivoting on a stack buffer.
cplx principal_minor(const ComplexMatrix& m, unsigned mask) {
    std::array<int, kMinorRouteMaxDim> idx{};
    int k = 0;
    for (int i = 0; i < m.rows(); ++i) {
        if (mask & (1u << i)) idx[k++] = i;
    }
    std::array<cplx, kMinorRouteMaxDim * kMinorRouteMaxDim> a{};
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c) a[r * k + c] = m(idx[r], idx[c]);

    cplx det = 1.0;
    for (int col = 0; col < k; ++col) {
        int piv = col;
        double best = std::abs(a[col * k + col]);
        for (int r = col + 1; r < k; ++r) {
            const double v = std::abs(a[r * k + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != col) {
            for (int c = 0; c < k; ++c) std::swap(a[piv * k + c], a[col * k + c]);
            det = -det;
        }
        const cplx p = a[col * k + col];
        det *= p;
        for (int r = col + 1; r < k; ++r) {
            const cplx f = a[r * k + col] / p;
            if (f == 0.0) continue;
            for (int c = col + 1; c < k; ++c) a[r * k + c] -= f * a[col * k + c];
        }
    }
    return det;
}

void check_square(const ComplexMatrix& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw InputError(std::string(what) + ": matrix must be square and non-empty, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

std::vector<HermitianMatrix> certify_all(std::span<const HermitianMatrix> hs, double tol_psd) {
    if (hs.empty()) throw InputError("characteristic gap: empty matrix list");
    const auto n = hs.front().dim();
    std::vector<HermitianMatrix> out;
    out.reserve(hs.size());
    for (std::size_t i = 0; i < hs.size(); ++i) {
        if (hs[i].dim() != n) {
            throw InputError("characteristic gap: matrix #" + std::to_string(i) + " has dimension " +
                             std::to_string(hs[i].dim()) + ", expected " + std::to_string(n));
        }
        try {
            out.push_back(certify_psd(hs[i], tol_psd));
        } catch (const PreconditionError& e) {
            throw PreconditionError("characteristic gap: matrix #" + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

void check_order(int r, Eigen::Index n) {
    if (r < 1 || r > n) {
        throw InputError("characteristic order r=" + std::to_string(r) + " outside [1, " +
                         std::to_string(n) + "]");
    }
}

}  // namespace

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

HermitianMatrix HermitianMatrix::from(const ComplexMatrix& m, double tol_herm) {
    check_square(m, "HermitianMatrix");
    if (!all_finite(m)) throw InputError("HermitianMatrix: non-finite entry");
    const double defect = max_abs(m - m.adjoint());
    if (defect > tol_herm * std::max(1.0, max_abs(m))) {
        throw InputError("HermitianMatrix: |M - M^dagger| = " + std::to_string(defect) +
                         " exceeds tolerance");
    }
    ComplexMatrix h = 0.5 * (m + m.adjoint());
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = h(i, i).real();
    return HermitianMatrix(std::move(h));
}

HermitianMatrix HermitianMatrix::from_real(const RealMatrix& m, double tol_herm) {
    return from(m.cast<cplx>(), tol_herm);
}

double CharCoeffVector::operator()(int r) const {
    if (r == 0) return 1.0;
    if (r < 0 || r > dim()) throw InputError("characteristic coefficient index out of range");
    return c_[static_cast<std::size_t>(r - 1)];
}

HermitianMatrix gram(std::span<const ComplexVector> vectors) {
    if (vectors.empty()) throw InputError("gram: need at least one vector");
    const auto dim = vectors.front().size();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim) {
            throw InputError("gram: vector #" + std::to_string(i) + " has dimension " +
                             std::to_string(vectors[i].size()) + ", expected " + std::to_string(dim));
        }
    }
    const auto n = static_cast<Eigen::Index>(vectors.size());
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::span<const cplx> vi(vectors[i].data(), dim);
        g(i, i) = kernels::cdot(vi, vi).real();
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const cplx v = kernels::cdot(vi, std::span<const cplx>(vectors[j].data(), dim));
            g(i, j) = v;
            g(j, i) = std::conj(v);
        }
    }
    return HermitianMatrix::from(g);
}

SymAsymPair split(const HermitianMatrix& h) {
    return {h.matrix().real(), h.matrix().imag()};
}

double min_eigenvalue(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("min_eigenvalue: eigen-solver failed");
    return es.eigenvalues()(0);
}

bool is_psd(const HermitianMatrix& h, double tol_psd) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("is_psd: eigen-solver failed");
    const auto& ev = es.eigenvalues();
    const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    return ev(0) >= -tol_psd * std::max(1.0, norm);
}

HermitianMatrix certify_psd(const HermitianMatrix& h, double tol_psd) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h.matrix());
    if (es.info() != Eigen::Success) throw NumericError("certify_psd: eigen-solver failed");
    RealVector ev = es.eigenvalues();
    const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (ev(0) < -tol_psd * std::max(1.0, norm)) {
        throw PreconditionError("not positive semidefinite (min eigenvalue " + std::to_string(ev(0)) + ")");
    }
    if (ev(0) >= 0.0) return h;
    ev = ev.cwiseMax(0.0);
    const ComplexMatrix& v = es.eigenvectors();
    return HermitianMatrix::from(v * ev.cast<cplx>().asDiagonal() * v.adjoint());
}

namespace detail {

std::vector<cplx> char_coeffs_by_minors(const ComplexMatrix& m) {
    check_square(m, "char_coeffs");
    const int n = static_cast<int>(m.rows());
    if (n > kMinorRouteMaxDim) throw InputError("char_coeffs_by_minors: n > 8");
    std::vector<cplx> c(static_cast<std::size_t>(n), 0.0);
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        c[static_cast<std::size_t>(std::popcount(mask) - 1)] += principal_minor(m, mask);
    }
    return c;
}

std::vector<cplx> char_coeffs_by_eigenvalues(const ComplexMatrix& m) {
    check_square(m, "char_coeffs");
    const auto n = m.rows();
    Eigen::VectorXcd lambda;
    if (max_abs(m - m.adjoint()) <= 1e-14 * std::max(1.0, max_abs(m))) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericError("char_coeffs: eigen-solver failed");
        lambda = es.eigenvalues().cast<cplx>();
    } else {
        Eigen::ComplexEigenSolver<ComplexMatrix> es(m, false);
        if (es.info() != Eigen::Success) throw NumericError("char_coeffs: eigen-solver failed");
        lambda = es.eigenvalues();
    }
    // Elementary symmetric polynomials of the eigenvalues.
    std::vector<cplx> e(static_cast<std::size_t>(n) + 1, 0.0);
    e[0] = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index r = k + 1; r >= 1; --r) e[r] += lambda(k) * e[r - 1];
    }
    return {e.begin() + 1, e.end()};
}

}  // namespace detail

CharCoeffVector char_coeffs(const ComplexMatrix& m) {
    check_square(m, "char_coeffs");
    if (m.rows() > kMaxCharDim) throw InputError("char_coeffs: n > 32 is not supported");
    const auto c = m.rows() <= kMinorRouteMaxDim ? detail::char_coeffs_by_minors(m)
                                                 : detail::char_coeffs_by_eigenvalues(m);
    const double scale = std::max(1.0, max_abs(m));
    std::vector<double> out;
    out.reserve(c.size());
    for (std::size_t r = 0; r < c.size(); ++r) {
        const double bound = 1e-10 * std::pow(scale, static_cast<double>(r + 1));
        if (std::abs(c[r].imag()) > std::max(bound, 1e-10 * std::abs(c[r].real()))) {
            throw NumericError("char_coeffs: coefficient C_" + std::to_string(r + 1) + " is not real");
        }
        out.push_back(c[r].real());
    }
    return CharCoeffVector(std::move(out));
}

CharCoeffVector char_coeffs(const RealMatrix& m) {
    return char_coeffs(ComplexMatrix(m.cast<cplx>()));
}

CharGap entangled_char_terms(std::span<const HermitianMatrix> hs, int r, double tol_psd) {
    const auto certified = certify_all(hs, tol_psd);
    const auto n = certified.front().dim();
    check_order(r, n);
    RealMatrix s = RealMatrix::Zero(n, n);
    RealMatrix a = RealMatrix::Zero(n, n);
    for (const auto& h : certified) {
        s += h.matrix().real();
        a += h.matrix().imag();
    }
    return {char_coeffs(s)(r), char_coeffs(a)(r)};
}

double entangled_char_gap(std::span<const HermitianMatrix> hs, int r, double tol_psd) {
    return entangled_char_terms(hs, r, tol_psd).gap();
}

CharGap superadditive_char_terms(std::span<const HermitianMatrix> hs, int r, double tol_psd) {
    const auto certified = certify_all(hs, tol_psd);
    const auto n = certified.front().dim();
    check_order(r, n);
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    double parts = 0.0;
    for (const auto& h : certified) {
        sum += h.matrix();
        parts += char_coeffs(h.matrix())(r);
    }
    return {char_coeffs(sum)(r), parts};
}

double superadditive_char_gap(std::span<const HermitianMatrix> hs, int r, double tol_psd) {
    return superadditive_char_terms(hs, r, tol_psd).gap();
}

}  // namespace urlab
