#pragma once

// Every uncertainty relation evaluated as lhs >= rhs, reported with both
// sides and the slack lhs - rhs.

#include "urlab/moments.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace urlab {

enum class UrId {
    heisenberg,
    schrodinger,
    robertson,
    characteristic,
    type_1_2a,
    type_1_2b,
    type_2_1,
    type_2_2a,
    type_2_2b,
    extended_schrodinger,
    entangled_heisenberg,
    type_3_1,
    type_2_m,
    lemma2_entangled,
    lemma2_superadditive,
};

std::string_view to_string(UrId id);
std::optional<UrId> ur_from_string(std::string_view name);

enum class Variant { a, b };

/// Index-literal reading of the (2,m) relation, or the
/// form that reduces to the state-extended Schrodinger relation at m = 2.
enum class TwoMForm { consistent, literal };

enum class Lemma2Flavor { entangled, superadditive };

struct URReport {
    UrId id{};
    int n = 0;  ///< observables
    int m = 0;  ///< states
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    bool saturated = false;
    double tol = 0.0;
    std::string inputs_digest;

    /// max(|lhs|, |rhs|, 1)
    double scale() const noexcept;
    bool violated() const noexcept { return slack < -tol * scale(); }
};

URReport make_report(UrId id, int n, int m, double lhs, double rhs, double tol, std::string digest);

URReport heisenberg(const Observable& x, const Observable& y, const QuantumState& state,
                    const Tolerances& tol = {});
URReport schrodinger(const Observable& x, const Observable& y, const QuantumState& state,
                     const Tolerances& tol = {});
URReport robertson(std::span<const Observable> observables, const QuantumState& state,
                   const Tolerances& tol = {});
URReport characteristic(std::span<const Observable> observables, const QuantumState& state, int r,
                        const Tolerances& tol = {});

URReport type_1_2(const Observable& x, const PureState& psi1, const PureState& psi2, Variant v,
                  const Tolerances& tol = {});
URReport type_2_1(const Observable& x, const Observable& y, const QuantumState& state,
                  const Tolerances& tol = {});
URReport type_2_2(const Observable& x, const Observable& y, const PureState& psi1, const PureState& psi2,
                  Variant v, const Tolerances& tol = {});
URReport extended_schrodinger(const Observable& x, const Observable& y, const PureState& psi1,
                              const PureState& psi2, const Tolerances& tol = {});
URReport entangled_heisenberg(const Observable& x, const Observable& y, const PureState& psi1,
                              const PureState& psi2, const Tolerances& tol = {});
URReport type_3_1(const Observable& x, const Observable& y, const Observable& z, const PureState& psi,
                  const Tolerances& tol = {});
URReport type_2_m(const Observable& x, const Observable& y, std::span<const QuantumState> states,
                  TwoMForm form = TwoMForm::consistent, const Tolerances& tol = {});
URReport lemma2_ur(std::span<const GramUR> matrices, int r, Lemma2Flavor flavor, const Tolerances& tol = {});

/// A catalog entry plus its discrete parameters, for generic evaluation.
struct UrSpec {
    UrId id = UrId::schrodinger;
    int order = 0;  ///< characteristic order r; 0 means r = n
    TwoMForm form = TwoMForm::consistent;

    std::string name() const;
};

/// Number of observables the relation takes; -1 for "any n >= 2".
int observable_arity(UrId id);
/// Number of states the relation takes; -1 for "any m >= 2".
int state_arity(UrId id);
/// Whether density matrices are admitted.
bool admits_mixed(UrId id);

/// Dispatches to the named relation. Not defined for the lemma2 entries,
/// which take Gram matrices rather than observables and states.
URReport evaluate(const UrSpec& spec, std::span<const Observable> observables,
                  std::span<const QuantumState> states, const Tolerances& tol = {});

}  // namespace urlab
