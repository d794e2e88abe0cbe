#pragma once

#include <stdexcept>
#include <string>

namespace urlab {

/// Malformed input: shape or dimension mismatch, non-Hermitian operator,
/// unnormalized state, unsupported state kind.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an inequality does not hold (e.g. a member of
/// a list passed to a characteristic gap is not positive semidefinite).
class PreconditionError : public InputError {
public:
    using InputError::InputError;
};

/// A state does not fit in the requested truncated Fock space.
class TruncationError : public InputError {
public:
    TruncationError(const std::string& what, int required_dim)
        : InputError(what), required_dim_(required_dim) {}
    int required_dim() const noexcept { return required_dim_; }

private:
    int required_dim_;
};

/// Eigen-solver failure, imaginary residue above the audit threshold, or any
/// other floating-point breakdown.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace urlab
