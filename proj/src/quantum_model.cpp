#include "urlab/quantum_model.hpp"

#include "urlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace urlab {
namespace {

constexpr int kMaxHilbertDim = 512;
constexpr int kMaxWorkingDim = 1024;
constexpr double kTaylorStepNorm = 4.0;

std::string fmt_num(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::string fmt_complex(cplx z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
    return os.str();
}

// (G v)_n = sum over bands of coef[n] * v[n + offset]; coefficients that
// would index outside [0, W) are zero.
struct Band {
    int offset;
    std::vector<cplx> coef;
};

using BandedOperator = std::vector<Band>;

void apply(const BandedOperator& g, const ComplexVector& v, ComplexVector& out) {
    const auto w = static_cast<int>(v.size());
    out.setZero(w);
    for (const auto& band : g) {
        const int lo = std::max(0, -band.offset);
        const int hi = std::min(w, w - band.offset);
        for (int n = lo; n < hi; ++n) out(n) += band.coef[static_cast<std::size_t>(n)] * v(n + band.offset);
    }
}

double row_sum_bound(const BandedOperator& g, int w) {
    double worst = 0.0;
    for (int n = 0; n < w; ++n) {
        double s = 0.0;
        for (const auto& band : g) s += std::abs(band.coef[static_cast<std::size_t>(n)]);
        worst = std::max(worst, s);
    }
    return worst;
}

// exp(G) v by a scaled Taylor series: `steps` applications of exp(G/steps)
// with ||G/steps|| <= kTaylorStepNorm,
// each summed until the next term is negligible.
ComplexVector expm_action(const BandedOperator& g, ComplexVector v) {
    const int w = static_cast<int>(v.size());
    const double norm = row_sum_bound(g, w);
    if (norm == 0.0) return v;
    const int steps = std::max(1, static_cast<int>(std::ceil(norm / kTaylorStepNorm)));
    const double h = 1.0 / steps;
    ComplexVector term(w), next(w);
    for (int s = 0; s < steps; ++s) {
        term = v;
        for (int k = 1; k < 80; ++k) {
            apply(g, term, next);
            term = next * (h / k);
            v += term;
            if (term.norm() <= 1e-18 * v.norm()) break;
        }
    }
    return v;
}

BandedOperator squeeze_generator(cplx xi, int w) {
    Band down{2, std::vector<cplx>(static_cast<std::size_t>(w), 0.0)};
    Band up{-2, std::vector<cplx>(static_cast<std::size_t>(w), 0.0)};
    for (int n = 0; n < w; ++n) {
        down.coef[n] = 0.5 * std::conj(xi) * std::sqrt(double(n + 1) * double(n + 2));
        if (n >= 2) up.coef[n] = -0.5 * xi * std::sqrt(double(n) * double(n - 1));
    }
    return {down, up};
}

BandedOperator displacement_generator(cplx alpha, int w) {
    Band down{1, std::vector<cplx>(static_cast<std::size_t>(w), 0.0)};
    Band up{-1, std::vector<cplx>(static_cast<std::size_t>(w), 0.0)};
    for (int n = 0; n < w; ++n) {
        down.coef[n] = -std::conj(alpha) * std::sqrt(double(n + 1));
        up.coef[n] = alpha * std::sqrt(double(n));
    }
    return {down, up};
}

// Smallest N' >= lo such that the weight at levels >= N'-2 is within `tol`;
// `weights` must extend far enough that its own tail is negligible.
int required_dim(const std::vector<double>& weights, double tol, int lo) {
    const int len = static_cast<int>(weights.size());
    std::vector<double> suffix(static_cast<std::size_t>(len) + 1, 0.0);
    for (int n = len - 1; n >= 0; --n) suffix[n] = suffix[n + 1] + weights[n];
    for (int dim = std::max(lo, 3); dim - 2 < len; ++dim) {
        if (suffix[static_cast<std::size_t>(dim - 2)] <= tol) return dim;
    }
    return len + 2;
}

ComplexVector complex_gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(i) = cplx(re, im) * (1.0 / std::numbers::sqrt2);
    }
    return v;
}

ComplexMatrix complex_gaussian_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) m.col(j) = complex_gaussian_vector(rng, rows);
    return m;
}

void check_sample_dim(int dim) {
    if (dim < 2) throw InputError("sample: dim must be >= 2, got " + std::to_string(dim));
}

}  // namespace

HilbertDim::HilbertDim(int n) : n_(n) {
    if (n < 2 || n > kMaxHilbertDim) {
        throw InputError("Hilbert dimension must lie in [2, 512], got " + std::to_string(n));
    }
}

Observable make_observable(std::string name, const ComplexMatrix& m) {
    return Observable{std::move(name), HermitianMatrix::from(m)};
}

PureState PureState::from(ComplexVector v, std::string label, bool normalize) {
    if (v.size() == 0) throw InputError("PureState: empty vector");
    if (!v.allFinite()) throw InputError("PureState: non-finite amplitude");
    const double norm = v.norm();
    if (normalize) {
        if (norm == 0.0) throw InputError("PureState: zero vector cannot be normalized");
        v /= norm;
    } else if (std::abs(norm - 1.0) > 1e-12) {
        throw InputError("PureState: |psi| = " + std::to_string(norm) + ", expected 1");
    }
    return PureState(std::move(v), std::move(label));
}

DensityMatrix DensityMatrix::from(const ComplexMatrix& rho, std::string label, const Tolerances& tol) {
    HermitianMatrix h = HermitianMatrix::from(rho, tol.herm);
    const double tr = h.matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-12) {
        throw InputError("DensityMatrix: trace " + std::to_string(tr) + ", expected 1");
    }
    if (!is_psd(h, tol.psd)) throw InputError("DensityMatrix: not positive semidefinite");
    return DensityMatrix(std::move(h), std::move(label));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
    const auto& v = psi.amplitudes();
    return DensityMatrix(HermitianMatrix::from(v * v.adjoint()), "proj(" + psi.label() + ")");
}

int state_dim(const QuantumState& s) {
    return std::visit([](const auto& x) { return x.dim(); }, s);
}

const std::string& state_label(const QuantumState& s) {
    return std::visit([](const auto& x) -> const std::string& { return x.label(); }, s);
}

ComplexMatrix annihilation(int n) {
    ComplexMatrix a = ComplexMatrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(double(k));
    return a;
}

Quadratures fock_operators(HilbertDim n) {
    const ComplexMatrix a = annihilation(n.value());
    const ComplexMatrix ad = a.adjoint();
    const ComplexMatrix q = (a + ad) * (1.0 / std::numbers::sqrt2);
    const ComplexMatrix p = (a - ad) * cplx(0.0, -(1.0 / std::numbers::sqrt2));
    return {make_observable("q", q), make_observable("p", p)};
}

Observable quad_plus(HilbertDim n) {
    const auto [q, p] = fock_operators(n);
    const auto& qm = q.matrix.matrix();
    const auto& pm = p.matrix.matrix();
    return make_observable("p^2-q^2", pm * pm - qm * qm);
}

Observable quad_mix(HilbertDim n) {
    const auto [q, p] = fock_operators(n);
    const auto& qm = q.matrix.matrix();
    const auto& pm = p.matrix.matrix();
    return make_observable("pq+qp", pm * qm + qm * pm);
}

PureState fock_state(int k, HilbertDim n) {
    if (k < 0 || k >= n.value()) {
        throw InputError("fock_state: level " + std::to_string(k) + " outside [0, " +
                         std::to_string(n.value()) + ")");
    }
    ComplexVector v = ComplexVector::Zero(n.value());
    v(k) = 1.0;
    return PureState::from(std::move(v), "fock(" + std::to_string(k) + ")");
}

PureState coherent_state(cplx alpha, HilbertDim n, TruncationPolicy policy) {
    const double mean = std::norm(alpha);
    const int len = n.value() + 64 + static_cast<int>(mean + 20.0 * std::sqrt(mean));
    std::vector<cplx> c(static_cast<std::size_t>(len));
    c[0] = std::exp(-0.5 * mean);
    for (int k = 1; k < len; ++k) c[k] = c[k - 1] * alpha / std::sqrt(double(k));
    std::vector<double> weights(c.size());
    std::transform(c.begin(), c.end(), weights.begin(), [](cplx z) { return std::norm(z); });

    const int need = required_dim(weights, policy.max_tail, 2);
    if (need > n.value()) {
        throw TruncationError("coherent_state(" + fmt_complex(alpha) + "): truncation tail exceeds " +
                                  fmt_num(policy.max_tail) + " at N=" + std::to_string(n.value()) +
                                  "; need N >= " + std::to_string(need),
                              need);
    }
    ComplexVector v = Eigen::Map<const ComplexVector>(c.data(), n.value());
    return PureState::from(std::move(v), "coherent(" + fmt_complex(alpha) + ")", true);
}

PureState squeezed_state(cplx alpha, double r, double phi, HilbertDim n, TruncationPolicy policy) {
    const int w = std::min(kMaxWorkingDim, n.value() + std::max(32, n.value() / 2));
    ComplexVector v = ComplexVector::Zero(w);
    v(0) = 1.0;
    if (r != 0.0) v = expm_action(squeeze_generator(std::polar(r, phi), w), std::move(v));
    if (alpha != 0.0) v = expm_action(displacement_generator(alpha, w), std::move(v));

    std::vector<double> weights(static_cast<std::size_t>(w));
    for (int k = 0; k < w; ++k) weights[k] = std::norm(v(k));
    const int need = required_dim(weights, policy.max_tail, 2);
    const std::string label =
        "squeezed(" + fmt_complex(alpha) + "," + fmt_num(r) + "," + fmt_num(phi) + ")";
    if (need > n.value()) {
        throw TruncationError(label + ": truncation tail exceeds " + fmt_num(policy.max_tail) +
                                  " at N=" + std::to_string(n.value()) + "; need N >= " +
                                  std::to_string(need),
                              need);
    }
    return PureState::from(v.head(n.value()), label, true);
}

SpinOperators spin_operators(int twice_j) {
    const int d = twice_j + 1;
    if (twice_j < 1 || d > 64) throw InputError("spin_operators: need 1/2 <= j and 2j+1 <= 64");
    const double j = 0.5 * twice_j;
    ComplexMatrix jp = ComplexMatrix::Zero(d, d);
    ComplexMatrix jz = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const double m = j - k;
        jz(k, k) = m;
        if (k > 0) jp(k - 1, k) = std::sqrt(j * (j + 1) - m * (m + 1));
    }
    const ComplexMatrix jm = jp.adjoint();
    const std::string tag = "(" + fmt_num(j) + ")";
    return {make_observable("jx" + tag, 0.5 * (jp + jm)),
            make_observable("jy" + tag, cplx(0.0, -0.5) * (jp - jm)),
            make_observable("jz" + tag, jz)};
}

PureState spin_state(int twice_j, int twice_m) {
    if (twice_j < 1 || std::abs(twice_m) > twice_j || (twice_j - twice_m) % 2 != 0) {
        throw InputError("spin_state: invalid (j, m)");
    }
    ComplexVector v = ComplexVector::Zero(twice_j + 1);
    v((twice_j - twice_m) / 2) = 1.0;
    return PureState::from(std::move(v), "spin(" + fmt_num(0.5 * twice_j) + "," + fmt_num(0.5 * twice_m) + ")");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
    auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
    auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
    std::seed_seq seq{lo(base), hi(base), lo(stream), hi(stream), lo(index), hi(index)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t(out[1]) << 32) | out[0];
}

PureState sample_pure(int dim, std::uint64_t seed) {
    check_sample_dim(dim);
    std::mt19937_64 rng(seed);
    return PureState::from(complex_gaussian_vector(rng, dim),
                           "sample(pure," + std::to_string(dim) + "," + std::to_string(seed) + ")", true);
}

DensityMatrix sample_density(int dim, std::uint64_t seed) {
    check_sample_dim(dim);
    std::mt19937_64 rng(seed);
    const ComplexMatrix g = complex_gaussian_matrix(rng, dim, dim);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix::from(rho, "sample(density," + std::to_string(dim) + "," + std::to_string(seed) + ")");
}

HermitianMatrix sample_hermitian(int dim, std::uint64_t seed) {
    check_sample_dim(dim);
    std::mt19937_64 rng(seed);
    const ComplexMatrix m = complex_gaussian_matrix(rng, dim, dim);
    return HermitianMatrix::from(0.5 * (m + m.adjoint()));
}

HermitianMatrix sample_psd(int dim, std::uint64_t seed, int rank) {
    check_sample_dim(dim);
    if (rank <= 0 || rank > dim) rank = dim;
    std::mt19937_64 rng(seed);
    const ComplexMatrix m = complex_gaussian_matrix(rng, dim, rank);
    return HermitianMatrix::from(m * m.adjoint());
}

std::variant<QuantumState, HermitianMatrix> sample(SampleKind kind, int dim, std::uint64_t seed) {
    switch (kind) {
        case SampleKind::pure: return QuantumState{sample_pure(dim, seed)};
        case SampleKind::density: return QuantumState{sample_density(dim, seed)};
        case SampleKind::hermitian: return sample_hermitian(dim, seed);
        case SampleKind::psd: return sample_psd(dim, seed);
    }
    throw InputError("sample: unknown kind");
}

PureState sample_gaussian(HilbertDim n, std::uint64_t seed, double alpha_max, double r_max) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double re = alpha_max * unit(rng);
    const double im = alpha_max * unit(rng);
    const double r = r_max * unit(rng);
    const double phi = std::numbers::pi * (unit(rng) + 1.0);
    return squeezed_state({re, im}, r, phi, n);
}

Observable sample_observable(int dim, std::uint64_t seed, std::string name) {
    if (name.empty()) name = "H(" + std::to_string(dim) + "," + std::to_string(seed) + ")";
    return Observable{std::move(name), sample_hermitian(dim, seed)};
}

}  // namespace urlab
