#pragma once

// Diagnostics built on the catalog: Gram-proportionality certificates,
// intelligent-state search over displaced squeezed states, precision
// comparison between relations, a saturation-transfer audit and an
// observable-induced divergence.

#include "urlab/ur_catalog.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace urlab {

struct SaturationCertificate {
    enum class Status { saturated, unsaturated, degenerate };

    Status status = Status::unsaturated;
    /// chi_2 = lambda chi_1 when saturated.
    std::optional<cplx> lambda;
    /// |sin| of the angle between the two centered vectors (0 when
    /// proportional); 0 for a degenerate certificate.
    double residual = 0.0;

    /// A degenerate pair (a centered vector vanishes) saturates trivially.
    bool is_saturated() const noexcept { return status != Status::unsaturated; }
};

/// Proportionality test for (X - <X>_2) psi_2 = lambda (X - <X>_1) psi_1.
/// Saturation uses the catalog rule on the 2x2 Gram determinant, so the
/// verdict agrees with type_1_2(..., Variant::a).saturated.
SaturationCertificate saturation_1_2a(const Observable& x, const PureState& psi1, const PureState& psi2,
                                      const Tolerances& tol = {});

/// Displaced squeezed state parameters: D(alpha) S(r e^{i phi}) |0>.
struct GaussianParams {
    cplx alpha{0.0, 0.0};
    double r = 0.0;
    double phi = 0.0;
};

PureState make_gaussian(const GaussianParams& p, HilbertDim n);

struct MinimizeSpec {
    UrSpec ur;
    std::vector<Observable> observables;
    /// One entry per state slot; nullopt slots are free.
    std::vector<std::optional<GaussianParams>> slots;
    HilbertDim dim{kDefaultHilbertDim};
    std::uint64_t seed = 0;
    int restarts = 8;
    /// Iteration cap per restart.
    int budget = 3000;
    double alpha_max = 1.5;
    double r_max = 0.6;
    /// Optional starting point for the first restart (free slots only).
    std::vector<GaussianParams> init;
    Tolerances tol{};
};

struct MinimizationResult {
    UrSpec ur;
    /// Parameters of every slot at the optimum (fixed slots echoed).
    std::vector<GaussianParams> params;
    double slack = 0.0;
    URReport report;
    int iterations = 0;
    bool converged = false;
};

/// Nelder-Mead over (Re alpha, Im alpha, r, phi) of every free slot.
/// converged iff the best slack improved by less than 1e-10 over the final
/// 20 iterations of the winning restart before the budget ran out.
MinimizationResult minimize_slack(const MinimizeSpec& spec);

/// One member of an evaluation ensemble.
struct Instance {
    std::shared_ptr<const std::vector<Observable>> observables;
    std::vector<QuantumState> states;
};

struct Ensemble {
    std::size_t size = 0;
    std::function<Instance(std::size_t)> make;
};

/// All ordered pairs of coherent states with alpha on the complex grid
/// [lo, hi]^2 (spacing `step`), observable `x`.
Ensemble coherent_pair_grid(const Observable& x, double lo, double hi, double step, HilbertDim n);

/// Random observables (dim x dim) and random pure or mixed states.
Ensemble random_ensemble(std::size_t size, int n_obs, int n_states, int dim_lo, int dim_hi, bool mixed,
                         std::uint64_t seed);

enum class SlackMeasure {
    relative,  ///< slack / max(|lhs|, |rhs|), 0 when both vanish
    absolute,  ///< slack
};

struct Counterexample {
    std::string inputs;
    double slack_a = 0.0;
    double slack_b = 0.0;
    double measure_a = 0.0;
    double measure_b = 0.0;
};

struct PrecisionStats {
    UrSpec ur_a;
    UrSpec ur_b;
    SlackMeasure measure = SlackMeasure::relative;
    std::size_t size = 0;
    std::size_t a_tighter = 0;
    std::size_t b_tighter = 0;
    std::size_t ties = 0;
    /// (a_tighter + ties / 2) / size
    double fraction_a_tighter = 0.0;
    std::size_t violations = 0;
    /// Instance with the largest margin in each direction.
    std::optional<Counterexample> a_tighter_example;
    std::optional<Counterexample> b_tighter_example;
};

PrecisionStats compare_precision(const UrSpec& a, const UrSpec& b, const Ensemble& ensemble,
                                 SlackMeasure measure = SlackMeasure::relative, const Tolerances& tol = {});

struct Remark1Spec {
    std::size_t size = 10000;
    std::uint64_t seed = 0;
    HilbertDim dim{kDefaultHilbertDim};
    double alpha_max = 1.0;
    double r_max = 0.5;
};

struct NonInverseExample {
    GaussianParams psi1;
    GaussianParams psi2;
    double schrodinger_slack_1 = 0.0;
    double schrodinger_slack_2 = 0.0;
    double extended_slack = 0.0;
};

struct Remark1Audit {
    std::size_t instances = 0;
    /// Instances with extended Schrodinger slack <= epsilon.
    std::size_t qualifying = 0;
    std::size_t violations = 0;
    double epsilon = 0.0;
    double epsilon_prime = 0.0;
    std::vector<std::string> violation_inputs;
    std::optional<NonInverseExample> non_inverse;
};

/// Over Gaussian pairs (X, Y) = (q, p): whenever extended_schrodinger is
/// saturated to epsilon, both single-state Schrodinger slacks must be
/// <= amplification * epsilon. Also exhibits a pair that saturates both
/// Schrodinger relations without saturating the extended one.
Remark1Audit remark1_audit(const Remark1Spec& spec, double epsilon, double amplification = 10.0);

/// sqrt(max(0, slack)) of type_1_2 with the chosen variant.
double divergence(const Observable& x, const PureState& psi1, const PureState& psi2, Variant v,
                  const Tolerances& tol = {});

struct TriangleScan {
    std::size_t triples = 0;
    std::size_t violations = 0;
    double rate() const noexcept { return triples ? double(violations) / double(triples) : 0.0; }
};

/// Exploratory: fraction of ordered triples violating d(a,c) <= d(a,b) + d(b,c).
TriangleScan divergence_triangle_scan(const Observable& x, std::span<const PureState> states, Variant v);

}  // namespace urlab
