#include "urlab/moments.hpp"

#include "urlab/errors.hpp"
#include "urlab/kernels.hpp"

#include <cmath>

namespace urlab {
namespace {

constexpr double kImagAudit = 1e-10;

void check_dims(std::span<const Observable> observables, int dim) {
    if (observables.empty()) throw InputError("moments: need at least one observable");
    for (const auto& x : observables) {
        if (x.dim() != dim) {
            throw InputError("moments: observable '" + x.name + "' has dimension " + std::to_string(x.dim()) +
                             ", state has dimension " + std::to_string(dim));
        }
    }
}

void audit_real(cplx z, double scale, const char* what) {
    if (std::abs(z.imag()) > kImagAudit * std::max(1.0, scale)) {
        throw NumericError(std::string("moments: imaginary residue in ") + what);
    }
}

const PureState& require_pure(const QuantumState& s, const char* who) {
    if (const auto* p = std::get_if<PureState>(&s)) return *p;
    throw InputError(std::string(who) + ": requires pure states, got density matrix '" + state_label(s) + "'");
}

std::vector<std::string> names_of(std::span<const Observable> observables) {
    std::vector<std::string> out;
    for (const auto& x : observables) out.push_back(x.name);
    return out;
}

// E_ij = <X_i X_j> for one state.
ComplexMatrix second_moments(std::span<const Observable> observables, const QuantumState& state,
                             std::vector<cplx>& means) {
    const auto n = static_cast<Eigen::Index>(observables.size());
    ComplexMatrix e(n, n);
    means.assign(static_cast<std::size_t>(n), 0.0);

    if (const auto* psi = std::get_if<PureState>(&state)) {
        const auto& v = psi->amplitudes();
        std::vector<ComplexVector> w;
        w.reserve(observables.size());
        for (const auto& x : observables) w.push_back(apply(x, v));
        const std::span<const cplx> vs(v.data(), v.size());
        for (Eigen::Index i = 0; i < n; ++i) {
            const std::span<const cplx> wi(w[i].data(), w[i].size());
            means[i] = kernels::cdot(vs, wi);
            e(i, i) = kernels::cdot(wi, wi).real();
            for (Eigen::Index j = i + 1; j < n; ++j) {
                e(i, j) = kernels::cdot(wi, std::span<const cplx>(w[j].data(), w[j].size()));
                e(j, i) = std::conj(e(i, j));
            }
        }
        return e;
    }

    const auto& rho = std::get<DensityMatrix>(state).matrix().matrix();
    std::vector<ComplexMatrix> rho_x;
    rho_x.reserve(observables.size());
    for (const auto& x : observables) rho_x.push_back(rho * x.matrix.matrix());
    for (Eigen::Index i = 0; i < n; ++i) {
        means[i] = rho_x[i].trace();
        for (Eigen::Index j = 0; j < n; ++j) {
            e(i, j) = rho_x[i].cwiseProduct(observables[j].matrix.matrix().transpose()).sum();
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        audit_real(e(i, i), std::abs(e(i, i)), "<X_i^2>");
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double scale = std::max(std::abs(e(i, j)), std::abs(e(j, i)));
            if (std::abs(e(i, j) - std::conj(e(j, i))) > kImagAudit * std::max(1.0, scale)) {
                throw NumericError("moments: <X_i X_j> and <X_j X_i> are not conjugate");
            }
        }
    }
    return e;
}

GramUR gram_of(GramKind kind, std::span<const Observable> observables, std::span<const QuantumState> states,
               bool centered) {
    if (observables.size() != states.size()) {
        throw InputError("gram: need one state per observable (" + std::to_string(observables.size()) +
                         " observables, " + std::to_string(states.size()) + " states)");
    }
    std::vector<ComplexVector> vecs;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto& psi = require_pure(states[k], "gram");
        check_dims(observables.subspan(k, 1), psi.dim());
        ComplexVector w = apply(observables[k], psi.amplitudes());
        if (centered) {
            const cplx mean = kernels::cdot({psi.amplitudes().data(), static_cast<std::size_t>(psi.dim())},
                                            {w.data(), static_cast<std::size_t>(w.size())});
            audit_real(mean, w.norm(), "<X>");
            w -= mean.real() * psi.amplitudes();
        }
        vecs.push_back(std::move(w));
        labels.push_back(psi.label());
    }
    return GramUR{kind, gram(vecs), names_of(observables), std::move(labels)};
}

}  // namespace

ComplexVector apply(const Observable& x, const ComplexVector& psi) {
    const auto n = static_cast<std::size_t>(x.dim());
    if (static_cast<std::size_t>(psi.size()) != n) {
        throw InputError("apply: observable '" + x.name + "' has dimension " + std::to_string(n) +
                         ", vector has dimension " + std::to_string(psi.size()));
    }
    ComplexVector out(static_cast<Eigen::Index>(n));
    kernels::gemv(x.matrix.matrix().data(), n, n, {psi.data(), n}, {out.data(), n});
    return out;
}

MomentSet moment_set(std::span<const Observable> observables, const QuantumState& state) {
    check_dims(observables, state_dim(state));
    std::vector<cplx> means;
    const ComplexMatrix e = second_moments(observables, state, means);
    const auto n = static_cast<Eigen::Index>(observables.size());

    MomentSet ms{RealVector(n), RealMatrix(n, n), RealMatrix(n, n)};
    for (Eigen::Index i = 0; i < n; ++i) {
        audit_real(means[i], std::sqrt(std::abs(e(i, i))), "<X>");
        ms.means(i) = means[i].real();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            // (E_ij + E_ji)/2 and -(i/2)(E_ij - E_ji), with E_ji = conj(E_ij)
            ms.sigma(i, j) = 0.5 * (e(i, j).real() + e(j, i).real()) - ms.means(i) * ms.means(j);
            ms.commutator(i, j) = 0.5 * (e(i, j).imag() - e(j, i).imag());
        }
        if (ms.sigma(i, i) < -1e-12 * std::max(1.0, std::abs(e(i, i)))) {
            throw NumericError("moments: negative variance for '" + observables[i].name + "'");
        }
    }
    return ms;
}

std::string_view to_string(GramKind k) {
    switch (k) {
        case GramKind::robertson: return "robertson";
        case GramKind::centered: return "centered";
        case GramKind::raw: return "raw";
    }
    return "?";
}

std::string GramUR::provenance() const {
    std::string out(to_string(kind));
    out += "[";
    for (std::size_t i = 0; i < observables.size(); ++i) out += (i ? "," : "") + observables[i];
    out += ";";
    for (std::size_t i = 0; i < states.size(); ++i) out += (i ? "," : "") + states[i];
    return out + "]";
}

GramUR robertson_matrix(std::span<const Observable> observables, const QuantumState& state) {
    const MomentSet ms = moment_set(observables, state);
    ComplexMatrix r = ms.sigma.cast<cplx>() + cplx(0.0, 1.0) * ms.commutator.cast<cplx>();
    return GramUR{GramKind::robertson, HermitianMatrix::from(r), names_of(observables), {state_label(state)}};
}

GramUR gram_centered(std::span<const Observable> observables, std::span<const QuantumState> states) {
    return gram_of(GramKind::centered, observables, states, true);
}

GramUR gram_raw(std::span<const Observable> observables, std::span<const QuantumState> states) {
    return gram_of(GramKind::raw, observables, states, false);
}

GramUR gram_raw(std::span<const Observable> observables, std::span<const ComplexVector> vectors) {
    if (observables.size() != vectors.size()) {
        throw InputError("gram_raw: need one vector per observable");
    }
    std::vector<ComplexVector> images;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < vectors.size(); ++k) {
        images.push_back(apply(observables[k], vectors[k]));
        labels.push_back("v" + std::to_string(k));
    }
    return GramUR{GramKind::raw, gram(images), names_of(observables), std::move(labels)};
}

TransformedObservables transform_observables(const RealMatrix& lambda, std::span<const Observable> observables) {
    const auto n = static_cast<Eigen::Index>(observables.size());
    if (lambda.rows() != n || lambda.cols() != n) {
        throw InputError("transform_observables: Lambda must be " + std::to_string(n) + "x" + std::to_string(n));
    }
    check_dims(observables, observables.front().dim());
    const auto d = observables.front().dim();
    TransformedObservables out;
    for (Eigen::Index i = 0; i < n; ++i) {
        ComplexMatrix m = ComplexMatrix::Zero(d, d);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (lambda(i, j) != 0.0) m += lambda(i, j) * observables[j].matrix.matrix();
        }
        out.observables.push_back(make_observable("(L.X)" + std::to_string(i), m));
    }
    out.det = lambda.determinant();
    const double scale = std::pow(std::max(1.0, lambda.cwiseAbs().maxCoeff()), double(n));
    out.nonsingular = std::abs(out.det) > 1e-12 * scale;
    return out;
}

TransformedStates transform_states(const ComplexMatrix& u, std::span<const PureState> states,
                                   const Observable& observable) {
    const auto m = static_cast<Eigen::Index>(states.size());
    if (m == 0 || u.rows() != m || u.cols() != m) {
        throw InputError("transform_states: U must be " + std::to_string(m) + "x" + std::to_string(m));
    }
    for (const auto& s : states) {
        if (s.dim() != observable.dim()) throw InputError("transform_states: dimension mismatch");
    }
    const auto d = static_cast<std::size_t>(observable.dim());
    std::vector<ComplexVector> out;
    for (Eigen::Index i = 0; i < m; ++i) {
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(d));
        for (Eigen::Index k = 0; k < m; ++k) {
            kernels::axpy(std::conj(u(i, k)), {states[k].amplitudes().data(), d}, {v.data(), d});
        }
        out.push_back(std::move(v));
    }
    const std::vector<Observable> xs(static_cast<std::size_t>(m), observable);
    GramUR g = gram_raw(xs, std::span<const ComplexVector>(out));
    const cplx det = u.determinant();
    const double scale = std::pow(std::max(1.0, max_abs(u)), double(m));
    return TransformedStates{std::move(out), std::move(g.matrix), det, std::abs(det) > 1e-12 * scale};
}

}  // namespace urlab
