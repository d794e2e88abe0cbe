#include "urlab/ur_catalog.hpp"

#include "urlab/errors.hpp"
#include "urlab/kernels.hpp"

#include <array>
#include <cmath>

namespace urlab {
namespace {

constexpr double kRealAudit = 1e-10;

struct NamedId {
    UrId id;
    std::string_view name;
};

constexpr std::array<NamedId, 15> kNames{{
    {UrId::heisenberg, "heisenberg"},
    {UrId::schrodinger, "schrodinger"},
    {UrId::robertson, "robertson"},
    {UrId::characteristic, "characteristic"},
    {UrId::type_1_2a, "type_1_2a"},
    {UrId::type_1_2b, "type_1_2b"},
    {UrId::type_2_1, "type_2_1"},
    {UrId::type_2_2a, "type_2_2a"},
    {UrId::type_2_2b, "type_2_2b"},
    {UrId::extended_schrodinger, "extended_schrodinger"},
    {UrId::entangled_heisenberg, "entangled_heisenberg"},
    {UrId::type_3_1, "type_3_1"},
    {UrId::type_2_m, "type_2_m"},
    {UrId::lemma2_entangled, "lemma2_entangled"},
    {UrId::lemma2_superadditive, "lemma2_superadditive"},
}};

std::string digest(UrId id, std::initializer_list<const Observable*> obs,
                   std::initializer_list<std::string_view> states) {
    std::string out(to_string(id));
    out += "|obs=";
    bool first = true;
    for (const auto* x : obs) {
        out += (first ? "" : ",") + x->name;
        first = false;
    }
    out += "|states=";
    first = true;
    for (auto s : states) {
        out += first ? "" : ",";
        out += s;
        first = false;
    }
    return out;
}

std::string digest(UrId id, std::span<const Observable> obs, std::span<const QuantumState> states) {
    std::string out(to_string(id));
    out += "|obs=";
    for (std::size_t i = 0; i < obs.size(); ++i) out += (i ? "," : "") + obs[i].name;
    out += "|states=";
    for (std::size_t i = 0; i < states.size(); ++i) out += (i ? "," : "") + state_label(states[i]);
    return out;
}

MomentSet pair_moments(const Observable& x, const Observable& y, const QuantumState& s) {
    const std::array<Observable, 2> obs{x, y};
    return moment_set(obs, s);
}

// <[X, Y]> as a complex number; its real part must vanish.
cplx commutator_mean(const Observable& x, const Observable& y, const PureState& psi) {
    const ComplexVector xv = apply(x, psi.amplitudes());
    const ComplexVector yv = apply(y, psi.amplitudes());
    const std::size_t n = static_cast<std::size_t>(psi.dim());
    const cplx xy = kernels::cdot({xv.data(), n}, {yv.data(), n});
    const cplx yx = kernels::cdot({yv.data(), n}, {xv.data(), n});
    const cplx c = xy - yx;
    if (std::abs(c.real()) > kRealAudit * std::max(1.0, std::abs(xy))) {
        throw NumericError("commutator mean has a real part: observables not Hermitian?");
    }
    return c;
}

double audited_real(cplx z, const char* what) {
    if (std::abs(z.imag()) > kRealAudit * std::max(1.0, std::abs(z))) {
        throw NumericError(std::string("imaginary residue in ") + what);
    }
    return z.real();
}

void check_same_dim(const Observable& a, const Observable& b) {
    if (a.dim() != b.dim()) throw InputError("observables '" + a.name + "' and '" + b.name + "' differ in dimension");
}

URReport gram_pair_report(UrId id, int n, const GramUR& g, const Tolerances& tol, std::string digest) {
    const auto& m = g.matrix.matrix();
    const double lhs = m(0, 0).real() * m(1, 1).real();
    const double rhs = std::norm(m(0, 1));
    return make_report(id, n, 2, lhs, rhs, tol.slack, std::move(digest));
}

const PureState& as_pure(const QuantumState& s, UrId id) {
    if (const auto* p = std::get_if<PureState>(&s)) return *p;
    throw InputError(std::string(to_string(id)) + ": requires pure states, got density matrix '" +
                     state_label(s) + "'");
}

}  // namespace

std::string_view to_string(UrId id) {
    for (const auto& [i, name] : kNames)
        if (i == id) return name;
    return "?";
}

std::optional<UrId> ur_from_string(std::string_view name) {
    for (const auto& [i, n] : kNames)
        if (n == name) return i;
    return std::nullopt;
}

double URReport::scale() const noexcept {
    return std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

URReport make_report(UrId id, int n, int m, double lhs, double rhs, double tol, std::string digest) {
    URReport r;
    r.id = id;
    r.n = n;
    r.m = m;
    r.lhs = lhs;
    r.rhs = rhs;
    r.slack = lhs - rhs;
    r.tol = tol;
    r.saturated = std::abs(r.slack) <= tol * r.scale();
    r.inputs_digest = std::move(digest);
    return r;
}

URReport heisenberg(const Observable& x, const Observable& y, const QuantumState& state, const Tolerances& tol) {
    const MomentSet ms = pair_moments(x, y, state);
    const double c = ms.commutator(0, 1);
    return make_report(UrId::heisenberg, 2, 1, ms.sigma(0, 0) * ms.sigma(1, 1), c * c, tol.slack,
                       digest(UrId::heisenberg, {&x, &y}, {state_label(state)}));
}

URReport schrodinger(const Observable& x, const Observable& y, const QuantumState& state, const Tolerances& tol) {
    const MomentSet ms = pair_moments(x, y, state);
    const double c = ms.commutator(0, 1);
    const double lhs = ms.sigma(0, 0) * ms.sigma(1, 1) - ms.sigma(0, 1) * ms.sigma(0, 1);
    return make_report(UrId::schrodinger, 2, 1, lhs, c * c, tol.slack,
                       digest(UrId::schrodinger, {&x, &y}, {state_label(state)}));
}

URReport robertson(std::span<const Observable> observables, const QuantumState& state, const Tolerances& tol) {
    if (observables.size() < 2) throw InputError("robertson: need n >= 2 observables");
    const MomentSet ms = moment_set(observables, state);
    const int n = ms.size();
    const auto ci = char_coeffs(ms.sigma);
    const auto cc = char_coeffs(ms.commutator);
    const std::array<QuantumState, 1> st{state};
    return make_report(UrId::robertson, n, 1, ci(n), cc(n), tol.slack, digest(UrId::robertson, observables, st));
}

URReport characteristic(std::span<const Observable> observables, const QuantumState& state, int r,
                        const Tolerances& tol) {
    const MomentSet ms = moment_set(observables, state);
    const int n = ms.size();
    if (r == 0) r = n;
    if (r < 1 || r > n) throw InputError("characteristic: order r=" + std::to_string(r) + " outside [1, n]");
    const std::array<QuantumState, 1> st{state};
    return make_report(UrId::characteristic, n, 1, char_coeffs(ms.sigma)(r), char_coeffs(ms.commutator)(r),
                       tol.slack, digest(UrId::characteristic, observables, st) + "|r=" + std::to_string(r));
}

URReport type_1_2(const Observable& x, const PureState& psi1, const PureState& psi2, Variant v,
                  const Tolerances& tol) {
    const std::array<Observable, 2> obs{x, x};
    const std::array<QuantumState, 2> st{psi1, psi2};
    const UrId id = v == Variant::a ? UrId::type_1_2a : UrId::type_1_2b;
    const GramUR g = v == Variant::a ? gram_centered(obs, st) : gram_raw(obs, st);
    return gram_pair_report(id, 1, g, tol, digest(id, {&x}, {psi1.label(), psi2.label()}));
}

URReport type_2_1(const Observable& x, const Observable& y, const QuantumState& state, const Tolerances& tol) {
    const MomentSet ms = pair_moments(x, y, state);
    const double mx = ms.means(0), my = ms.means(1);
    const double lhs = (ms.sigma(0, 0) + mx * mx) * (ms.sigma(1, 1) + my * my);
    const double cov = ms.sigma(0, 1) + mx * my;
    const double c = ms.commutator(0, 1);
    return make_report(UrId::type_2_1, 2, 1, lhs, cov * cov + c * c, tol.slack,
                       digest(UrId::type_2_1, {&x, &y}, {state_label(state)}));
}

URReport type_2_2(const Observable& x, const Observable& y, const PureState& psi1, const PureState& psi2,
                  Variant v, const Tolerances& tol) {
    check_same_dim(x, y);
    const std::array<Observable, 2> obs{x, y};
    const std::array<QuantumState, 2> st{psi1, psi2};
    const UrId id = v == Variant::a ? UrId::type_2_2a : UrId::type_2_2b;
    const GramUR g = v == Variant::a ? gram_centered(obs, st) : gram_raw(obs, st);
    return gram_pair_report(id, 2, g, tol, digest(id, {&x, &y}, {psi1.label(), psi2.label()}));
}

URReport extended_schrodinger(const Observable& x, const Observable& y, const PureState& psi1,
                              const PureState& psi2, const Tolerances& tol) {
    const MomentSet m1 = pair_moments(x, y, psi1);
    const MomentSet m2 = pair_moments(x, y, psi2);
    const double lhs = 0.5 * (m1.variance(0) * m2.variance(1) + m2.variance(0) * m1.variance(1)) -
                       m1.sigma(0, 1) * m2.sigma(0, 1);
    const cplx c1 = commutator_mean(x, y, psi1);
    const cplx c2 = commutator_mean(x, y, psi2);
    const double rhs = 0.25 * audited_real(c1 * std::conj(c2), "extended_schrodinger rhs");
    return make_report(UrId::extended_schrodinger, 2, 2, lhs, rhs, tol.slack,
                       digest(UrId::extended_schrodinger, {&x, &y}, {psi1.label(), psi2.label()}));
}

URReport entangled_heisenberg(const Observable& x, const Observable& y, const PureState& psi1,
                              const PureState& psi2, const Tolerances& tol) {
    const MomentSet m1 = pair_moments(x, y, psi1);
    const MomentSet m2 = pair_moments(x, y, psi2);
    const double lhs = 0.5 * (m1.variance(0) * m2.variance(1) + m2.variance(0) * m1.variance(1));
    const double rhs = 0.25 * std::abs(commutator_mean(x, y, psi1) * commutator_mean(x, y, psi2));
    return make_report(UrId::entangled_heisenberg, 2, 2, lhs, rhs, tol.slack,
                       digest(UrId::entangled_heisenberg, {&x, &y}, {psi1.label(), psi2.label()}));
}

URReport type_3_1(const Observable& x, const Observable& y, const Observable& z, const PureState& psi,
                  const Tolerances& tol) {
    const std::array<Observable, 3> obs{x, y, z};
    const MomentSet ms = moment_set(obs, psi);
    const double lhs = ms.variance(0) * (ms.variance(1) + ms.variance(2));
    const cplx xz = commutator_mean(x, z, psi);
    const cplx yx = commutator_mean(y, x, psi);
    const double rhs = 2.0 * ms.sigma(0, 1) * ms.sigma(0, 2) + 0.5 * audited_real(xz * yx, "type_3_1 rhs");
    return make_report(UrId::type_3_1, 3, 1, lhs, rhs, tol.slack,
                       digest(UrId::type_3_1, {&x, &y, &z}, {psi.label()}));
}

URReport type_2_m(const Observable& x, const Observable& y, std::span<const QuantumState> states, TwoMForm form,
                  const Tolerances& tol) {
    if (states.size() < 2) throw InputError("type_2_m: need m >= 2 states");
    std::vector<MomentSet> ms;
    ms.reserve(states.size());
    for (const auto& s : states) ms.push_back(pair_moments(x, y, s));

    double lhs = 0.0;
    double rhs = 0.0;
    for (std::size_t mu = 0; mu < ms.size(); ++mu) {
        for (std::size_t nu = mu + 1; nu < ms.size(); ++nu) {
            const auto& a = ms[mu];
            const auto& b = ms[nu];
            if (form == TwoMForm::consistent) {
                lhs += a.variance(0) * b.variance(1) + b.variance(0) * a.variance(1);
                lhs -= 2.0 * a.sigma(0, 1) * b.sigma(0, 1);
            } else {
                lhs += a.variance(0) * b.variance(1) + b.variance(0) * a.variance(0);
                lhs -= 2.0 * a.sigma(0, 1) * b.variance(1);
            }
            rhs += 2.0 * a.commutator(0, 1) * b.commutator(0, 1);
        }
    }
    const std::array<Observable, 2> obs{x, y};
    auto report = make_report(UrId::type_2_m, 2, static_cast<int>(states.size()), lhs, rhs, tol.slack,
                              digest(UrId::type_2_m, obs, states) +
                                  (form == TwoMForm::literal ? "|literal" : ""));

    if (form == TwoMForm::consistent) {
        // The consistent form is the r = n superadditive gap over the
        // Robertson matrices; cross-check the two routes.
        std::vector<HermitianMatrix> rs;
        for (const auto& m : ms) {
            ComplexMatrix r = m.sigma.cast<cplx>() + cplx(0.0, 1.0) * m.commutator.cast<cplx>();
            rs.push_back(HermitianMatrix::from(r));
        }
        const double gap = superadditive_char_gap(rs, 2, tol.psd);
        if (std::abs(gap - report.slack) > 1e-9 * report.scale()) {
            throw NumericError("type_2_m: explicit form and superadditive gap disagree");
        }
    }
    return report;
}

URReport lemma2_ur(std::span<const GramUR> matrices, int r, Lemma2Flavor flavor, const Tolerances& tol) {
    if (matrices.empty()) throw InputError("lemma2_ur: empty matrix list");
    std::vector<HermitianMatrix> hs;
    std::string dig;
    for (const auto& g : matrices) {
        hs.push_back(g.matrix);
        dig += (dig.empty() ? "" : "+") + g.provenance();
    }
    const int n = static_cast<int>(hs.front().dim());
    if (r == 0) r = n;
    const UrId id = flavor == Lemma2Flavor::entangled ? UrId::lemma2_entangled : UrId::lemma2_superadditive;
    const CharGap g = flavor == Lemma2Flavor::entangled ? entangled_char_terms(hs, r, tol.psd)
                                                        : superadditive_char_terms(hs, r, tol.psd);
    return make_report(id, n, static_cast<int>(hs.size()), g.lhs, g.rhs, tol.slack,
                       std::string(to_string(id)) + "|r=" + std::to_string(r) + "|" + dig);
}

std::string UrSpec::name() const {
    std::string out(to_string(id));
    if (id == UrId::characteristic && order > 0) out += "(r=" + std::to_string(order) + ")";
    if (id == UrId::type_2_m && form == TwoMForm::literal) out += "(literal)";
    return out;
}

int observable_arity(UrId id) {
    switch (id) {
        case UrId::type_1_2a:
        case UrId::type_1_2b: return 1;
        case UrId::type_3_1: return 3;
        case UrId::robertson:
        case UrId::characteristic:
        case UrId::lemma2_entangled:
        case UrId::lemma2_superadditive: return -1;
        default: return 2;
    }
}

int state_arity(UrId id) {
    switch (id) {
        case UrId::type_1_2a:
        case UrId::type_1_2b:
        case UrId::type_2_2a:
        case UrId::type_2_2b:
        case UrId::extended_schrodinger:
        case UrId::entangled_heisenberg: return 2;
        case UrId::type_2_m:
        case UrId::lemma2_entangled:
        case UrId::lemma2_superadditive: return -1;
        default: return 1;
    }
}

bool admits_mixed(UrId id) {
    switch (id) {
        case UrId::heisenberg:
        case UrId::schrodinger:
        case UrId::robertson:
        case UrId::characteristic:
        case UrId::type_2_1:
        case UrId::type_2_m:
        case UrId::lemma2_entangled:
        case UrId::lemma2_superadditive: return true;
        default: return false;
    }
}

URReport evaluate(const UrSpec& spec, std::span<const Observable> obs, std::span<const QuantumState> states,
                  const Tolerances& tol) {
    const UrId id = spec.id;
    const int na = observable_arity(id);
    const int sa = state_arity(id);
    if (id == UrId::lemma2_entangled || id == UrId::lemma2_superadditive) {
        throw InputError("evaluate: lemma2 relations take Gram matrices; use lemma2_ur");
    }
    if ((na > 0 && static_cast<int>(obs.size()) != na) || (na < 0 && obs.size() < 1)) {
        throw InputError(std::string(to_string(id)) + ": expected " + std::to_string(na) + " observables, got " +
                         std::to_string(obs.size()));
    }
    if ((sa > 0 && static_cast<int>(states.size()) != sa) || (sa < 0 && states.size() < 2)) {
        throw InputError(std::string(to_string(id)) + ": wrong number of states (" +
                         std::to_string(states.size()) + ")");
    }
    switch (id) {
        case UrId::heisenberg: return heisenberg(obs[0], obs[1], states[0], tol);
        case UrId::schrodinger: return schrodinger(obs[0], obs[1], states[0], tol);
        case UrId::robertson: return robertson(obs, states[0], tol);
        case UrId::characteristic: return characteristic(obs, states[0], spec.order, tol);
        case UrId::type_1_2a:
            return type_1_2(obs[0], as_pure(states[0], id), as_pure(states[1], id), Variant::a, tol);
        case UrId::type_1_2b:
            return type_1_2(obs[0], as_pure(states[0], id), as_pure(states[1], id), Variant::b, tol);
        case UrId::type_2_1: return type_2_1(obs[0], obs[1], states[0], tol);
        case UrId::type_2_2a:
            return type_2_2(obs[0], obs[1], as_pure(states[0], id), as_pure(states[1], id), Variant::a, tol);
        case UrId::type_2_2b:
            return type_2_2(obs[0], obs[1], as_pure(states[0], id), as_pure(states[1], id), Variant::b, tol);
        case UrId::extended_schrodinger:
            return extended_schrodinger(obs[0], obs[1], as_pure(states[0], id), as_pure(states[1], id), tol);
        case UrId::entangled_heisenberg:
            return entangled_heisenberg(obs[0], obs[1], as_pure(states[0], id), as_pure(states[1], id), tol);
        case UrId::type_3_1: return type_3_1(obs[0], obs[1], obs[2], as_pure(states[0], id), tol);
        case UrId::type_2_m: return type_2_m(obs[0], obs[1], states, spec.form, tol);
        default: break;
    }
    throw InputError("evaluate: unsupported relation");
}

}  // namespace urlab
