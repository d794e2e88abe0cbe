#pragma once

// Second moments of observable tuples: means, uncertainty matrix sigma,
// mean-commutator matrix C, the Robertson matrix sigma + iC, and the two
// Gram-matrix constructions over one state per observable.

#include "urlab/quantum_model.hpp"

#include <span>
#include <string>
#include <vector>

namespace urlab {

/// means_i = <X_i>, sigma_ij = <X_i X_j + X_j X_i>/2 - <X_i><X_j>,
/// commutator_jk = -(i/2) <[X_j, X_k]> (real antisymmetric).
struct MomentSet {
    RealVector means;
    RealMatrix sigma;
    RealMatrix commutator;

    int size() const noexcept { return static_cast<int>(means.size()); }
    double variance(int i) const { return sigma(i, i); }
};

/// Throws InputError on dimension mismatch and NumericError when an
/// imaginary residue exceeds 1e-10 (relative).
MomentSet moment_set(std::span<const Observable> observables, const QuantumState& state);

enum class GramKind {
    robertson,  ///< sigma + iC in one (possibly mixed) state
    centered,   ///< Gram of (X_k - <X_k>_k) psi_k
    raw,        ///< Gram of X_k psi_k
};

std::string_view to_string(GramKind k);

struct GramUR {
    GramKind kind;
    HermitianMatrix matrix;
    std::vector<std::string> observables;
    std::vector<std::string> states;

    std::string provenance() const;
};

GramUR robertson_matrix(std::span<const Observable> observables, const QuantumState& state);

/// One pure state per observable; a DensityMatrix is rejected.
GramUR gram_centered(std::span<const Observable> observables, std::span<const QuantumState> states);
GramUR gram_raw(std::span<const Observable> observables, std::span<const QuantumState> states);

/// Gram of X_k v_k for arbitrary (unnormalized) vectors v_k.
GramUR gram_raw(std::span<const Observable> observables, std::span<const ComplexVector> vectors);

struct TransformedObservables {
    std::vector<Observable> observables;
    double det = 0.0;
    bool nonsingular = false;
};

/// X'_i = sum_j lambda_ij X_j.
TransformedObservables transform_observables(const RealMatrix& lambda,
                                             std::span<const Observable> observables);

struct TransformedStates {
    /// psi'_i = sum_k conj(U_ik) psi_k, not renormalized.
    std::vector<ComplexVector> vectors;
    /// Gram of X psi'_i; equals U G U^dagger.
    HermitianMatrix gram;
    cplx det;
    bool nonsingular = false;
};

TransformedStates transform_states(const ComplexMatrix& u, std::span<const PureState> states,
                                   const Observable& observable);

/// X psi via the dispatched matvec kernel.
ComplexVector apply(const Observable& x, const ComplexVector& psi);

}  // namespace urlab
