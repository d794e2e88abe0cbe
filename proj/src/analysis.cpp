#include "urlab/analysis.hpp"

#include "parallel.hpp"
#include "urlab/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace urlab {
namespace {

constexpr double kPenalty = 1e3;
constexpr int kStallWindow = 20;
constexpr double kStallImprovement = 1e-10;

std::string describe(const Instance& inst) {
    std::string out = "obs=";
    for (std::size_t i = 0; i < inst.observables->size(); ++i) out += (i ? "," : "") + (*inst.observables)[i].name;
    out += "|states=";
    for (std::size_t i = 0; i < inst.states.size(); ++i) out += (i ? "," : "") + state_label(inst.states[i]);
    return out;
}

double relative(const URReport& r) {
    const double s = std::max(std::abs(r.lhs), std::abs(r.rhs));
    return s == 0.0 ? 0.0 : r.slack / s;
}

// Bounded reparametrization: the optimizer runs on unconstrained u, the
// state family sees |Re alpha|, |Im alpha| < alpha_max and |r| < r_max.
GaussianParams decode(const double* u, double alpha_max, double r_max) {
    return {{alpha_max * std::tanh(u[0]), alpha_max * std::tanh(u[1])}, r_max * std::tanh(u[2]), u[3]};
}

void encode(const GaussianParams& p, double alpha_max, double r_max, double* u) {
    auto inv = [](double x, double bound) { return std::atanh(std::clamp(x / bound, -0.999, 0.999)); };
    u[0] = inv(p.alpha.real(), alpha_max);
    u[1] = inv(p.alpha.imag(), alpha_max);
    u[2] = inv(p.r, r_max);
    u[3] = p.phi;
}

struct Objective {
    const MinimizeSpec* spec;
    std::vector<std::optional<QuantumState>> fixed;
    std::vector<std::size_t> free_slots;

    std::vector<GaussianParams> params(const double* u) const {
        std::vector<GaussianParams> out;
        std::size_t k = 0;
        for (const auto& slot : spec->slots) {
            if (slot) {
                out.push_back(*slot);
            } else {
                out.push_back(decode(u + 4 * k, spec->alpha_max, spec->r_max));
                ++k;
            }
        }
        return out;
    }

    URReport report(const double* u) const {
        const auto ps = params(u);
        std::vector<QuantumState> states;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            states.push_back(fixed[i] ? *fixed[i] : QuantumState{make_gaussian(ps[i], spec->dim)});
        }
        return evaluate(spec->ur, spec->observables, states, spec->tol);
    }

    double operator()(const double* u) const {
        try {
            const double s = report(u).slack;
            return std::isfinite(s) ? s : kPenalty;
        } catch (const TruncationError&) {
            return kPenalty;
        }
    }
};

double gsl_objective(const gsl_vector* x, void* ctx) {
    const auto* obj = static_cast<const Objective*>(ctx);
    try {
        return (*obj)(gsl_vector_const_ptr(x, 0));
    } catch (...) {
        return kPenalty;
    }
}

struct RestartResult {
    std::vector<double> u;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

RestartResult run_simplex(const Objective& obj, std::vector<double> start, int budget) {
    const std::size_t dim = start.size();
    gsl_multimin_function fn{&gsl_objective, dim, const_cast<Objective*>(&obj)};
    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* step = gsl_vector_alloc(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        gsl_vector_set(x, i, start[i]);
        gsl_vector_set(step, i, 0.5);
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    RestartResult out;
    std::deque<double> history{s->fval};
    int iter = 0;
    while (iter < budget) {
        ++iter;
        if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
        history.push_back(s->fval);
        if (history.size() > kStallWindow + 1) history.pop_front();
        const bool stalled = history.size() == kStallWindow + 1 && history.front() - history.back() < kStallImprovement;
        if (stalled && gsl_multimin_fminimizer_size(s) < 1e-6) {
            out.converged = true;
            break;
        }
    }
    out.iterations = iter;
    out.value = s->fval;
    out.u.assign(gsl_vector_const_ptr(s->x, 0), gsl_vector_const_ptr(s->x, 0) + dim);
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(x);
    gsl_vector_free(step);
    return out;
}

}  // namespace

SaturationCertificate saturation_1_2a(const Observable& x, const PureState& psi1, const PureState& psi2,
                                      const Tolerances& tol) {
    const std::array<Observable, 2> obs{x, x};
    const std::array<QuantumState, 2> st{psi1, psi2};
    const GramUR gram = gram_centered(obs, st);
    const ComplexMatrix& g = gram.matrix.matrix();
    const double n1 = g(0, 0).real();
    const double n2 = g(1, 1).real();
    const double scale = std::max(1.0, max_abs(x.matrix.matrix()));

    SaturationCertificate cert;
    if (n1 <= 1e-20 * scale * scale || n2 <= 1e-20 * scale * scale) {
        cert.status = SaturationCertificate::Status::degenerate;
        return cert;
    }
    const URReport r = make_report(UrId::type_1_2a, 1, 2, n1 * n2, std::norm(g(0, 1)), tol.slack, {});
    cert.residual = std::sqrt(std::max(0.0, r.slack) / r.lhs);
    if (r.saturated) {
        cert.status = SaturationCertificate::Status::saturated;
        cert.lambda = g(0, 1) / n1;
    }
    return cert;
}

PureState make_gaussian(const GaussianParams& p, HilbertDim n) {
    if (p.r == 0.0) return coherent_state(p.alpha, n);
    return squeezed_state(p.alpha, p.r, p.phi, n);
}

MinimizationResult minimize_slack(const MinimizeSpec& spec) {
    if (spec.ur.id == UrId::lemma2_entangled || spec.ur.id == UrId::lemma2_superadditive) {
        throw InputError("minimize_slack: relation has no state slots");
    }
    const int arity = state_arity(spec.ur.id);
    if (spec.slots.empty() || (arity > 0 && static_cast<int>(spec.slots.size()) != arity)) {
        throw InputError("minimize_slack: " + spec.ur.name() + " takes " + std::to_string(arity) + " state slot(s)");
    }
    Objective obj{&spec, {}, {}};
    for (std::size_t i = 0; i < spec.slots.size(); ++i) {
        if (spec.slots[i]) {
            obj.fixed.emplace_back(make_gaussian(*spec.slots[i], spec.dim));
        } else {
            obj.fixed.emplace_back(std::nullopt);
            obj.free_slots.push_back(i);
        }
    }
    if (obj.free_slots.empty()) throw InputError("minimize_slack: no free state slot");
    const std::size_t dim = 4 * obj.free_slots.size();

    RestartResult best;
    for (int k = 0; k < std::max(1, spec.restarts); ++k) {
        std::vector<double> start(dim);
        if (k == 0 && spec.init.size() == obj.free_slots.size()) {
            for (std::size_t j = 0; j < spec.init.size(); ++j) {
                encode(spec.init[j], spec.alpha_max, spec.r_max, start.data() + 4 * j);
            }
        } else {
            std::mt19937_64 rng(derive_seed(spec.seed, 0x4e4d, static_cast<std::uint64_t>(k)));
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            for (std::size_t j = 0; j < dim; ++j) start[j] = (j % 4 == 3 ? std::numbers::pi : 1.0) * unit(rng);
        }
        RestartResult rr = run_simplex(obj, std::move(start), spec.budget);
        if (rr.value < best.value) best = std::move(rr);
    }

    MinimizationResult out;
    out.ur = spec.ur;
    out.params = obj.params(best.u.data());
    out.report = obj.report(best.u.data());
    out.slack = out.report.slack;
    out.iterations = best.iterations;
    out.converged = best.converged;
    return out;
}

Ensemble coherent_pair_grid(const Observable& x, double lo, double hi, double step, HilbertDim n) {
    if (step <= 0.0 || hi < lo) throw InputError("coherent_pair_grid: bad grid");
    std::vector<double> axis;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-12) break;
        axis.push_back(v);
    }
    auto states = std::make_shared<std::vector<PureState>>();
    for (double re : axis)
        for (double im : axis) states->push_back(coherent_state({re, im}, n));
    auto obs = std::make_shared<const std::vector<Observable>>(std::vector<Observable>{x});
    const std::size_t k = states->size();
    return Ensemble{k * k, [states, obs, k](std::size_t i) {
                        return Instance{obs, {(*states)[i / k], (*states)[i % k]}};
                    }};
}

Ensemble random_ensemble(std::size_t size, int n_obs, int n_states, int dim_lo, int dim_hi, bool mixed,
                         std::uint64_t seed) {
    if (dim_lo < 2 || dim_hi < dim_lo) throw InputError("random_ensemble: bad dimension range");
    return Ensemble{size, [=](std::size_t i) {
                        const std::uint64_t s = derive_seed(seed, 1, i);
                        const int dim = dim_lo + static_cast<int>(s % static_cast<std::uint64_t>(dim_hi - dim_lo + 1));
                        auto obs = std::make_shared<std::vector<Observable>>();
                        for (int k = 0; k < n_obs; ++k) {
                            obs->push_back(sample_observable(dim, derive_seed(seed, 100 + k, i)));
                        }
                        std::vector<QuantumState> states;
                        for (int k = 0; k < n_states; ++k) {
                            const std::uint64_t ss = derive_seed(seed, 200 + k, i);
                            if (mixed && (ss >> 63)) {
                                states.emplace_back(sample_density(dim, ss));
                            } else {
                                states.emplace_back(sample_pure(dim, ss));
                            }
                        }
                        return Instance{std::move(obs), std::move(states)};
                    }};
}

PrecisionStats compare_precision(const UrSpec& a, const UrSpec& b, const Ensemble& ensemble, SlackMeasure measure,
                                 const Tolerances& tol) {
    if (observable_arity(a.id) != observable_arity(b.id) || state_arity(a.id) != state_arity(b.id)) {
        throw InputError("compare_precision: " + a.name() + " and " + b.name() + " take different inputs");
    }
    struct Row {
        URReport ra, rb;
    };
    std::vector<Row> rows(ensemble.size);
    detail::parallel_for(ensemble.size, [&](std::size_t i) {
        const Instance inst = ensemble.make(i);
        rows[i] = {evaluate(a, *inst.observables, inst.states, tol), evaluate(b, *inst.observables, inst.states, tol)};
    });

    PrecisionStats st;
    st.ur_a = a;
    st.ur_b = b;
    st.measure = measure;
    st.size = ensemble.size;
    double best_a = 0.0, best_b = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& [ra, rb] = rows[i];
        if (ra.violated() || rb.violated()) ++st.violations;
        const double ma = measure == SlackMeasure::relative ? relative(ra) : ra.slack;
        const double mb = measure == SlackMeasure::relative ? relative(rb) : rb.slack;
        const double tie_tol =
            measure == SlackMeasure::relative ? tol.slack : tol.slack * std::max(ra.scale(), rb.scale());
        if (std::abs(ma - mb) <= tie_tol) {
            ++st.ties;
            continue;
        }
        auto example = [&] { return Counterexample{describe(ensemble.make(i)), ra.slack, rb.slack, ma, mb}; };
        if (ma < mb) {
            ++st.a_tighter;
            if (mb - ma > best_a) {
                best_a = mb - ma;
                st.a_tighter_example = example();
            }
        } else {
            ++st.b_tighter;
            if (ma - mb > best_b) {
                best_b = ma - mb;
                st.b_tighter_example = example();
            }
        }
    }
    st.fraction_a_tighter = st.size ? (double(st.a_tighter) + 0.5 * double(st.ties)) / double(st.size) : 0.0;
    return st;
}

Remark1Audit remark1_audit(const Remark1Spec& spec, double epsilon, double amplification) {
    const auto [q, p] = fock_operators(spec.dim);
    auto draw = [&](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        GaussianParams g;
        g.alpha = {spec.alpha_max * unit(rng), spec.alpha_max * unit(rng)};
        g.r = spec.r_max * unit(rng);
        g.phi = std::numbers::pi * (unit(rng) + 1.0);
        return g;
    };

    struct Row {
        GaussianParams p1, p2;
        double ext = 0.0, s1 = 0.0, s2 = 0.0;
        std::string inputs;
    };
    std::vector<Row> rows(spec.size);
    detail::parallel_for(spec.size, [&](std::size_t i) {
        std::mt19937_64 rng(derive_seed(spec.seed, 0x5231, i));
        Row row;
        row.p1 = draw(rng);
        row.p2 = draw(rng);
        switch (i % 4) {
            case 0: row.p2 = row.p1; break;
            case 1: row.p2.r = row.p1.r, row.p2.phi = row.p1.phi; break;
            default: break;
        }
        const PureState a = make_gaussian(row.p1, spec.dim);
        const PureState b = make_gaussian(row.p2, spec.dim);
        const URReport ext = extended_schrodinger(q, p, a, b);
        row.ext = ext.slack;
        row.s1 = schrodinger(q, p, a).slack;
        row.s2 = schrodinger(q, p, b).slack;
        row.inputs = ext.inputs_digest;
        rows[i] = std::move(row);
    });

    Remark1Audit audit;
    audit.instances = spec.size;
    audit.epsilon = epsilon;
    audit.epsilon_prime = amplification * epsilon;
    for (const auto& row : rows) {
        if (row.ext <= epsilon) {
            ++audit.qualifying;
            if (row.s1 > audit.epsilon_prime || row.s2 > audit.epsilon_prime) {
                ++audit.violations;
                audit.violation_inputs.push_back(row.inputs);
            }
        } else if (!audit.non_inverse && row.s1 <= epsilon && row.s2 <= epsilon && row.ext > audit.epsilon_prime) {
            audit.non_inverse = NonInverseExample{row.p1, row.p2, row.s1, row.s2, row.ext};
        }
    }
    if (!audit.non_inverse) {
        // Two squeezed vacua with different squeezing both saturate the
        // Schrodinger relation; their extended slack is cosh(2(r1-r2))/4 - 1/4.
        const GaussianParams g1{{0.0, 0.0}, 0.3, 0.0};
        const GaussianParams g2{{0.0, 0.0}, -0.2, 0.0};
        const PureState a = make_gaussian(g1, spec.dim);
        const PureState b = make_gaussian(g2, spec.dim);
        audit.non_inverse = NonInverseExample{g1, g2, schrodinger(q, p, a).slack, schrodinger(q, p, b).slack,
                                              extended_schrodinger(q, p, a, b).slack};
    }
    return audit;
}

double divergence(const Observable& x, const PureState& psi1, const PureState& psi2, Variant v,
                  const Tolerances& tol) {
    return std::sqrt(std::max(0.0, type_1_2(x, psi1, psi2, v, tol).slack));
}

TriangleScan divergence_triangle_scan(const Observable& x, std::span<const PureState> states, Variant v) {
    const std::size_t n = states.size();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = divergence(x, states[i], states[j], v);
    TriangleScan scan;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            for (std::size_t c = 0; c < n; ++c) {
                if (a == b || b == c || a == c) continue;
                ++scan.triples;
                if (d[a * n + c] > d[a * n + b] + d[b * n + c] + 1e-12) ++scan.violations;
            }
    return scan;
}

}  // namespace urlab
