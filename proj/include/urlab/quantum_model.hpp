#pragma once

// Finite-dimensional states and observables: truncated Fock space with
// dimensionless quadratures ([q, p] = i), coherent and displaced squeezed
// states, angular momentum matrices, and seeded random ensembles.

#include "urlab/matrix_kernel.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace urlab {

/// Fock-space truncation dimension, 2 <= N <= 512.
class HilbertDim {
public:
    explicit HilbertDim(int n);
    int value() const noexcept { return n_; }

private:
    int n_;
};

inline constexpr int kDefaultHilbertDim = 64;

struct Observable {
    std::string name;
    HermitianMatrix matrix;

    int dim() const noexcept { return static_cast<int>(matrix.dim()); }
};

/// Validates Hermiticity of `m`.
Observable make_observable(std::string name, const ComplexMatrix& m);

class PureState {
public:
    /// Requires |v| = 1 within 1e-12 unless `normalize` is set.
    static PureState from(ComplexVector v, std::string label = {}, bool normalize = false);

    const ComplexVector& amplitudes() const noexcept { return v_; }
    const std::string& label() const noexcept { return label_; }
    int dim() const noexcept { return static_cast<int>(v_.size()); }

private:
    PureState(ComplexVector v, std::string label) : v_(std::move(v)), label_(std::move(label)) {}
    ComplexVector v_;
    std::string label_;
};

class DensityMatrix {
public:
    /// Requires a Hermitian, psd, unit-trace matrix.
    static DensityMatrix from(const ComplexMatrix& rho, std::string label = {},
                              const Tolerances& tol = {});
    static DensityMatrix from_pure(const PureState& psi);

    const HermitianMatrix& matrix() const noexcept { return rho_; }
    const std::string& label() const noexcept { return label_; }
    int dim() const noexcept { return static_cast<int>(rho_.dim()); }

private:
    DensityMatrix(HermitianMatrix rho, std::string label) : rho_(std::move(rho)), label_(std::move(label)) {}
    HermitianMatrix rho_;
    std::string label_;
};

using QuantumState = std::variant<PureState, DensityMatrix>;

int state_dim(const QuantumState& s);
const std::string& state_label(const QuantumState& s);

// --- oscillator -----------------------------------------------------------

/// Annihilation operator a|n> = sqrt(n)|n-1> on levels 0..N-1.
ComplexMatrix annihilation(int n);

struct Quadratures {
    Observable q;
    Observable p;
};

/// q = (a + a^dagger)/sqrt(2), p = (a - a^dagger)/(i sqrt(2)).
Quadratures fock_operators(HilbertDim n);

/// p^2 - q^2 and pq + qp built from the truncated quadratures.
Observable quad_plus(HilbertDim n);
Observable quad_mix(HilbertDim n);

PureState fock_state(int k, HilbertDim n);

/// Weight allowed on the top two levels (n >= N-2) of an oscillator state
/// before construction is refused.
struct TruncationPolicy {
    double max_tail = 1e-12;
};

/// Glauber coherent state; throws TruncationError naming the smallest
/// adequate N when the Poisson tail above level N-3 exceeds the policy.
PureState coherent_state(cplx alpha, HilbertDim n, TruncationPolicy policy = {});

/// D(alpha) S(xi) |0> with xi = r e^{i phi} and
/// S(xi) = exp((conj(xi) a^2 - xi a^dagger^2) / 2), so phi = 0 squeezes q:
/// (Delta q)^2 = e^{-2r}/2.
PureState squeezed_state(cplx alpha, double r, double phi, HilbertDim n,
                         TruncationPolicy policy = {});

// --- spin -------------------------------------------------------------------

struct SpinOperators {
    Observable jx;
    Observable jy;
    Observable jz;
};

/// Angular momentum j = twice_j / 2 in the basis m = j, j-1, ..., -j.
SpinOperators spin_operators(int twice_j);

/// |j, m> with m = twice_m / 2.
PureState spin_state(int twice_j, int twice_m);

// --- random ensembles -------------------------------------------------------

enum class SampleKind { pure, density, hermitian, psd };

/// Pure: Haar vector. Density: Ginibre G G^dagger / tr. Hermitian:
/// (M + M^dagger)/2. Psd: M M^dagger. Bit-identical output for identical
/// (kind, dim, seed).
std::variant<QuantumState, HermitianMatrix> sample(SampleKind kind, int dim, std::uint64_t seed);

PureState sample_pure(int dim, std::uint64_t seed);
DensityMatrix sample_density(int dim, std::uint64_t seed);
HermitianMatrix sample_hermitian(int dim, std::uint64_t seed);
/// M M^dagger with M of shape dim x rank (rank <= dim gives a singular matrix).
HermitianMatrix sample_psd(int dim, std::uint64_t seed, int rank = 0);
/// Random Gaussian-family state; parameters uniform in the given boxes.
PureState sample_gaussian(HilbertDim n, std::uint64_t seed, double alpha_max, double r_max);
Observable sample_observable(int dim, std::uint64_t seed, std::string name = {});

/// Independent per-instance seed derived from (base, stream, index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index);

}  // namespace urlab
