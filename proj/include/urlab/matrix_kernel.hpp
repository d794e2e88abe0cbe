#pragma once

// Finite-dimensional Hermitian matrix machinery: Gram matrices, positivity,
// characteristic coefficients and the two characteristic-coefficient
// inequalities for sums of positive semidefinite matrices.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace urlab {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Numerical thresholds shared by every check in the library.
///   herm:  |M - M^dagger| <= herm * max(1, |M|)
///   psd:   min eigenvalue >= -psd * max(1, |H|)
///   slack: |lhs - rhs| <= slack * max(|lhs|, |rhs|, 1) counts as equality
struct Tolerances {
    double herm = 1e-10;
    double psd = 1e-10;
    double slack = 1e-8;
};

/// Largest entry modulus, the norm used for all relative thresholds.
double max_abs(const ComplexMatrix& m);

/// A complex matrix that is Hermitian to within tolerance. Construction
/// validates and then replaces the matrix by its exact Hermitian part.
class HermitianMatrix {
public:
    static HermitianMatrix from(const ComplexMatrix& m, double tol_herm = Tolerances{}.herm);
    static HermitianMatrix from_real(const RealMatrix& m, double tol_herm = Tolerances{}.herm);

    const ComplexMatrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }

private:
    explicit HermitianMatrix(ComplexMatrix m) : m_(std::move(m)) {}
    ComplexMatrix m_;
};

/// Real (symmetric) and imaginary (antisymmetric) parts of a Hermitian matrix.
struct SymAsymPair {
    RealMatrix sym;
    RealMatrix asym;
};

/// C_1 ... C_n of an n x n matrix, C_r being the sum of all r x r principal
/// minors, so that det(M - lambda) = sum_r C_r (-lambda)^(n-r) with C_0 = 1.
class CharCoeffVector {
public:
    CharCoeffVector() = default;
    explicit CharCoeffVector(std::vector<double> c) : c_(std::move(c)) {}

    int dim() const noexcept { return static_cast<int>(c_.size()); }
    /// r in [0, dim]; r = 0 gives 1.
    double operator()(int r) const;
    const std::vector<double>& values() const noexcept { return c_; }

private:
    std::vector<double> c_;
};

HermitianMatrix gram(std::span<const ComplexVector> vectors);

SymAsymPair split(const HermitianMatrix& h);

double min_eigenvalue(const HermitianMatrix& h);

bool is_psd(const HermitianMatrix& h, double tol_psd = Tolerances{}.psd);

/// Returns h with negative eigenvalues set to zero, or throws
/// PreconditionError if h is not psd within tol_psd.
HermitianMatrix certify_psd(const HermitianMatrix& h, double tol_psd = Tolerances{}.psd);

/// Principal-minor sums for n <= 8, eigenvalue route above; n <= 32.
/// The coefficients must be real (Hermitian or real input); a complex
/// coefficient is a NumericError.
CharCoeffVector char_coeffs(const ComplexMatrix& m);
CharCoeffVector char_coeffs(const RealMatrix& m);

namespace detail {
std::vector<cplx> char_coeffs_by_minors(const ComplexMatrix& m);
std::vector<cplx> char_coeffs_by_eigenvalues(const ComplexMatrix& m);
}  // namespace detail

/// Both sides of a characteristic inequality; gap() = lhs - rhs.
struct CharGap {
    double lhs = 0.0;
    double rhs = 0.0;
    double gap() const noexcept { return lhs - rhs; }
};

/// lhs = C_r(S_1 + ... + S_m), rhs = C_r(A_1 + ... + A_m).
CharGap entangled_char_terms(std::span<const HermitianMatrix> hs, int r,
                             double tol_psd = Tolerances{}.psd);
double entangled_char_gap(std::span<const HermitianMatrix> hs, int r,
                          double tol_psd = Tolerances{}.psd);

/// lhs = C_r(H_1 + ... + H_m), rhs = C_r(H_1) + ... + C_r(H_m).
CharGap superadditive_char_terms(std::span<const HermitianMatrix> hs, int r,
                                 double tol_psd = Tolerances{}.psd);
double superadditive_char_gap(std::span<const HermitianMatrix> hs, int r,
                              double tol_psd = Tolerances{}.psd);

}  // namespace urlab
