// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"
#include "urlab/analysis.hpp"
#include "urlab/cli.hpp"
#include "urlab/moments.hpp"
#include "urlab/ur_catalog.hpp"

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace urlab;

namespace {

// Pinned tolerances.
constexpr double kAnalyticRel = 1e-6;
constexpr double kEqualityAbs = 1e-8;
constexpr double kValidityRel = 1e-8;
constexpr double kReductionRel = 1e-10;
constexpr double kLemmaSlack = 1e-8;
constexpr double kOrderOneAbs = 1e-12;
constexpr double kRemarkEpsilon = 1e-8;
constexpr double kMinimizerValue = 1e-6;
constexpr double kMinimizerParam = 1e-3;
constexpr double kCovarianceRel = 1e-10;
constexpr double kScanSeconds = 60.0;

const HilbertDim kN(64);
const HilbertDim kSqueezeN(128);

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail << "first failure: " << what << "; ";
        pass = pass && ok;
    }
};

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Observable> random_obs(int n, int dim, std::uint64_t seed) {
    std::vector<Observable> v;
    for (int k = 0; k < n; ++k) v.push_back(sample_observable(dim, derive_seed(seed, 31, k)));
    return v;
}

QuantumState random_state(int dim, std::uint64_t seed, bool mixed) {
    return mixed ? QuantumState(sample_density(dim, seed)) : QuantumState(sample_pure(dim, seed));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome canonical_extended() {
    Outcome o;
    const auto [q, p] = fock_operators(kSqueezeN);
    const auto coh = coherent_state({0.7, -0.4}, kSqueezeN);
    double worst = 0.0;
    for (double r : {0.0, 0.5, 1.0}) {
        const auto rep = extended_schrodinger(q, p, coh, squeezed_state(0.0, r, 0.0, kSqueezeN));
        const double want = 0.25 * (std::cosh(2.0 * r) - 1.0);
        if (r == 0.0) {
            o.require(rep.saturated, "saturated at r = 0");
            o.require(std::abs(rep.slack) <= kAnalyticRel * rep.scale(), "slack at r = 0");
        } else {
            const double e = std::abs(rep.slack - want) / want;
            worst = std::max(worst, e);
            o.require(e <= kAnalyticRel, "slack at r = " + fmt(r));
        }
        o.require(std::abs(rep.rhs - 0.25) <= kAnalyticRel * 0.25, "rhs 1/4 at r = " + fmt(r));
    }
    o.detail << "N=128, r in {0,0.5,1}, worst relative slack error " << fmt(worst);
    return o;
}

Outcome abstract_entangled() {
    Outcome o;
    const auto [q, p] = fock_operators(kSqueezeN);
    const auto coh = coherent_state({-0.3, 0.5}, kSqueezeN);
    double worst = 0.0;
    for (double r : {0.0, 0.25, 0.5, 1.0}) {
        const auto rep = entangled_heisenberg(q, p, coh, squeezed_state(0.0, r, 0.0, kSqueezeN));
        const double lhs2 = 2.0 * rep.lhs, want = 0.5 * std::cosh(2.0 * r);
        const double e = std::abs(lhs2 - want) / want;
        worst = std::max(worst, e);
        o.require(e <= kAnalyticRel, "doubled lhs at r = " + fmt(r));
        if (r == 0.0) o.require(std::abs(lhs2 - 2.0 * rep.rhs) <= kEqualityAbs, "equality at r = 0");
    }
    o.detail << "doubled lhs vs cosh(2r)/2, worst relative error " << fmt(worst);
    return o;
}

Outcome universal_validity() {
    Outcome o;
    constexpr std::uint64_t kPerUr = 10000;
    const Tolerances tol;
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t total = 0, mixed_count = 0;
    double worst = 0.0;
    for (int k = 0; k <= static_cast<int>(UrId::lemma2_superadditive); ++k) {
        const UrId id = static_cast<UrId>(k);
        const bool lemma2 = id == UrId::lemma2_entangled || id == UrId::lemma2_superadditive;
        std::size_t bad = 0;
        for (std::uint64_t s = 0; s < kPerUr; ++s) {
            const std::uint64_t seed = derive_seed(2024, 1 + k, s);
            const int dim = 2 + static_cast<int>(seed % 11);
            const int n = observable_arity(id) < 0 ? 2 + static_cast<int>((seed >> 8) % 3) : observable_arity(id);
            const int m = state_arity(id) < 0 ? 2 + static_cast<int>((seed >> 12) % 3) : state_arity(id);
            const bool mixed = admits_mixed(id) && ((seed >> 16) & 1);
            const auto obs = random_obs(n, dim, seed);
            std::vector<QuantumState> st;
            for (int j = 0; j < m; ++j) st.push_back(random_state(dim, derive_seed(seed, 7, j), mixed));
            mixed_count += mixed;
            URReport rep;
            if (lemma2) {
                const int mm = 1 + static_cast<int>((seed >> 20) % 3);
                const int r = 1 + static_cast<int>((seed >> 24) % n);
                std::vector<GramUR> gs;
                for (int j = 0; j < mm; ++j) {
                    gs.push_back(robertson_matrix(obs, random_state(dim, derive_seed(seed, 8, j), (seed >> 17) & 1)));
                }
                rep = lemma2_ur(gs, r, id == UrId::lemma2_entangled ? Lemma2Flavor::entangled
                                                                    : Lemma2Flavor::superadditive, tol);
            } else {
                UrSpec spec{id};
                if (id == UrId::characteristic) spec.order = 1 + static_cast<int>((seed >> 24) % n);
                rep = evaluate(spec, obs, st, tol);
            }
            worst = std::min(worst, rep.slack / rep.scale());
            if (rep.slack < -kValidityRel * rep.scale()) ++bad;
            ++total;
        }
        o.require(bad == 0, std::string(to_string(id)) + " has " + std::to_string(bad) + " violations");
    }
    const double secs = seconds_since(t0);
    o.require(secs < kScanSeconds, "runtime " + fmt(secs) + " s");
    o.detail << total << " instances (" << mixed_count << " mixed), worst slack/scale " << fmt(worst) << ", "
             << fmt(secs) << " s";
    return o;
}

Outcome reductions() {
    Outcome o;
    constexpr std::uint64_t kDraws = 1000;
    std::array<double, 6> worst{};
    auto same = [&](std::size_t which, const URReport& a, double lhs, double rhs, double slack) {
        const double e = std::max({rel(a.lhs, lhs), rel(a.rhs, rhs), rel(a.slack, slack)});
        worst[which] = std::max(worst[which], e);
        o.require(e <= kReductionRel, "reduction " + std::to_string(which + 1));
    };
    for (std::uint64_t s = 0; s < kDraws; ++s) {
        const std::uint64_t seed = derive_seed(77, 0, s);
        const int dim = 2 + static_cast<int>(seed % 11);
        const int n = 2 + static_cast<int>((seed >> 8) % 3);
        const auto obs = random_obs(n, dim, seed);
        const auto psi = sample_pure(dim, derive_seed(seed, 1, 0));
        const QuantumState st = random_state(dim, derive_seed(seed, 2, 0), (seed >> 16) & 1);

        const auto sch = schrodinger(obs[0], obs[1], psi);
        const auto ext = extended_schrodinger(obs[0], obs[1], psi, psi);
        same(0, ext, sch.lhs, sch.rhs, sch.slack);

        // Z = Y rearranges to twice the Schrodinger slack.
        const auto t31 = type_3_1(obs[0], obs[1], obs[1], psi);
        worst[1] = std::max(worst[1], rel(t31.slack, 2.0 * sch.slack));
        o.require(rel(t31.slack, 2.0 * sch.slack) <= kReductionRel, "reduction 2");

        // m = 2: each side is twice the extended relation.
        const auto psi2 = sample_pure(dim, derive_seed(seed, 1, 1));
        const auto ext2 = extended_schrodinger(obs[0], obs[1], psi, psi2);
        const std::array<QuantumState, 2> pair{psi, psi2};
        const auto t2m = type_2_m(obs[0], obs[1], pair);
        same(2, t2m, 2.0 * ext2.lhs, 2.0 * ext2.rhs, 2.0 * ext2.slack);

        const auto rob = robertson(obs, st);
        const auto chn = characteristic(obs, st, n);
        same(3, chn, rob.lhs, rob.rhs, rob.slack);

        const std::span<const Observable> two(obs.data(), 2);
        const auto rob2 = robertson(two, st);
        const auto sch2 = schrodinger(obs[0], obs[1], st);
        same(4, rob2, sch2.lhs, sch2.rhs, sch2.slack);

        const std::array<GramUR, 1> g{robertson_matrix(obs, st)};
        for (int r = 1; r <= n; ++r) {
            const auto ch = characteristic(obs, st, r);
            same(5, lemma2_ur(g, r, Lemma2Flavor::entangled), ch.lhs, ch.rhs, ch.slack);
        }
    }
    o.detail << kDraws << " draws each, worst relative differences";
    for (double w : worst) o.detail << " " << fmt(w);
    return o;
}

Outcome lemma_suite() {
    Outcome o;
    constexpr std::uint64_t kEnsembles = 10000;
    double worst = 0.0, worst_order_one = 0.0;
    for (std::uint64_t s = 0; s < kEnsembles; ++s) {
        const std::uint64_t seed = derive_seed(5150, 0, s);
        const int n = 2 + static_cast<int>(seed % 7);
        const int m = 1 + static_cast<int>((seed >> 8) % 3);
        std::vector<HermitianMatrix> hs;
        for (int j = 0; j < m; ++j) {
            const int rank = static_cast<int>((seed >> (12 + 4 * j)) % (n + 1));
            hs.push_back(sample_psd(n, derive_seed(seed, 3, j), rank));
        }
        for (const auto& h : hs) {
            const auto sa = split(h);
            const auto cs = char_coeffs(sa.sym), ca = char_coeffs(sa.asym);
            for (int r = 1; r <= n; ++r) {
                const double sc = std::max({std::abs(cs(r)), std::abs(ca(r)), 1.0});
                worst = std::min(worst, (cs(r) - ca(r)) / sc);
                o.require(cs(r) - ca(r) >= -kLemmaSlack * sc, "single-matrix inequality");
            }
        }
        for (int r = 1; r <= n; ++r) {
            for (const auto& t : {entangled_char_terms(hs, r), superadditive_char_terms(hs, r)}) {
                const double sc = std::max({std::abs(t.lhs), std::abs(t.rhs), 1.0});
                worst = std::min(worst, t.gap() / sc);
                o.require(t.gap() >= -kLemmaSlack * sc, "characteristic gap");
            }
        }
        const auto one = superadditive_char_terms(hs, 1);
        worst_order_one = std::max(worst_order_one, std::abs(one.gap()));
        o.require(std::abs(one.gap()) <= kOrderOneAbs, "order-one superadditive gap");
    }
    o.detail << kEnsembles << " psd ensembles, worst gap/scale " << fmt(worst) << ", max |order-one gap| "
             << fmt(worst_order_one);
    return o;
}

Outcome independence() {
    Outcome o;
    const auto [q, p] = fock_operators(kN);
    const auto ens = coherent_pair_grid(p, -2.0, 2.0, 0.5, kN);
    const auto st = compare_precision(UrSpec{UrId::type_1_2a}, UrSpec{UrId::type_1_2b}, ens);
    o.require(st.violations == 0, "violations");
    o.require(st.a_tighter > 0 && st.a_tighter_example.has_value(), "a tighter somewhere");
    o.require(st.b_tighter > 0 && st.b_tighter_example.has_value(), "b tighter somewhere");
    o.detail << st.size << " pairs, a tighter " << st.a_tighter << ", b tighter " << st.b_tighter << ", ties "
             << st.ties;
    return o;
}

Outcome remark_audit() {
    Outcome o;
    Remark1Spec spec;
    spec.size = 10000;
    spec.seed = 1;
    const auto t0 = std::chrono::steady_clock::now();
    const auto audit = remark1_audit(spec, kRemarkEpsilon);
    o.require(audit.instances == spec.size, "instance count");
    o.require(audit.violations == 0, std::to_string(audit.violations) + " forward violations");
    o.require(audit.non_inverse.has_value(), "non-inverse example");
    if (audit.non_inverse) {
        o.require(audit.non_inverse->schrodinger_slack_1 <= kRemarkEpsilon &&
                      audit.non_inverse->schrodinger_slack_2 <= kRemarkEpsilon &&
                      audit.non_inverse->extended_slack > audit.epsilon_prime,
                  "non-inverse example is not one");
    }
    o.detail << audit.instances << " pairs, " << audit.qualifying << " qualifying, " << audit.violations
             << " violations, non-inverse extended slack "
             << (audit.non_inverse ? fmt(audit.non_inverse->extended_slack) : std::string("none")) << ", "
             << fmt(seconds_since(t0)) << " s";
    return o;
}

Outcome coherent_fixed() {
    Outcome o;
    const auto [q, p] = fock_operators(kN);
    MinimizeSpec spec;
    spec.ur = UrSpec{UrId::extended_schrodinger};
    spec.observables = {q, p};
    spec.slots = {GaussianParams{}, std::nullopt};
    spec.seed = 1;
    const auto res = minimize_slack(spec);
    // With a coherent partner the left side is (dq^2 + dp^2) / 4 of the free state.
    const double sum = 4.0 * res.report.lhs;
    const double r = res.params.at(1).r;
    o.require(std::abs(sum - 1.0) <= kMinimizerValue, "dq^2 + dp^2 = " + fmt(sum));
    o.require(std::abs(r) <= kMinimizerParam, "r = " + fmt(r));
    o.require(res.slack >= -spec.tol.slack, "slack below zero");
    o.detail << "dq^2+dp^2 - 1 = " << fmt(sum - 1.0) << ", r = " << fmt(r) << ", converged "
             << (res.converged ? "yes" : "no");
    return o;
}

double relmax(const ComplexMatrix& a, const ComplexMatrix& b) {
    const double sc = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    return (a - b).cwiseAbs().maxCoeff() / sc;
}

double relmax(const RealMatrix& a, const RealMatrix& b) {
    return relmax(ComplexMatrix(a.cast<cplx>()), ComplexMatrix(b.cast<cplx>()));
}

Outcome covariance_laws() {
    Outcome o;
    constexpr std::uint64_t kDraws = 1000;
    const auto [q, p] = fock_operators(kN);
    const std::array<Observable, 2> qp{q, p};
    double worst = 0.0;
    auto track = [&](double e, const std::string& what) {
        worst = std::max(worst, e);
        o.require(e <= kCovarianceRel, what);
    };
    for (std::uint64_t s = 0; s < kDraws; ++s) {
        const std::uint64_t seed = derive_seed(31337, 0, s);
        const int dim = 2 + static_cast<int>(seed % 7);
        const int n = 2 + static_cast<int>((seed >> 8) % 3);
        const auto obs = random_obs(n, dim, seed);
        const QuantumState st = random_state(dim, derive_seed(seed, 1, 0), (seed >> 16) & 1);
        const auto m0 = moment_set(obs, st);

        // General, then orthogonal.
        const RealMatrix lam = oracle::random_unitary(n, seed).real() + RealMatrix::Identity(n, n);
        const auto t = transform_observables(lam, obs);
        const auto mt = moment_set(t.observables, st);
        track(relmax(mt.sigma, lam * m0.sigma * lam.transpose()), "sigma law");
        track(relmax(mt.commutator, lam * m0.commutator * lam.transpose()), "commutator law");
        track(rel(t.det, lam.determinant()), "det flag");
        const Eigen::HouseholderQR<RealMatrix> qr(lam);
        const RealMatrix orth = qr.householderQ();
        const auto mo = moment_set(transform_observables(orth, obs).observables, st);
        const auto c0s = char_coeffs(m0.sigma), c0a = char_coeffs(m0.commutator);
        const auto cos_ = char_coeffs(mo.sigma), coa = char_coeffs(mo.commutator);
        for (int r = 1; r <= n; ++r) track(rel(c0s(r) - c0a(r), cos_(r) - coa(r)), "orthogonal invariance");

        // Symplectic on (q, p): det 1 preserves det sigma and det C.
        RealMatrix sp(2, 2);
        const double a = 0.2 + 2.0 * double(seed % 97) / 97.0, b = double((seed >> 7) % 13) / 13.0 - 0.5;
        sp << a, b, 0.0, 1.0 / a;
        const auto g = squeezed_state({0.1 * double(seed % 5), -0.2}, 0.1 * double((seed >> 3) % 5), 0.3, kN);
        const auto mg = moment_set(qp, g);
        const auto ms = moment_set(transform_observables(sp, qp).observables, g);
        track(rel(ms.sigma.determinant(), mg.sigma.determinant()), "symplectic det sigma");
        track(rel(ms.commutator.determinant(), mg.commutator.determinant()), "symplectic det C");

        // State law: Gram of X psi'_i is U G U^dagger; unitary U preserves det G.
        const int k = 2 + static_cast<int>((seed >> 20) % 3);
        const auto x = obs[0];
        std::vector<PureState> ps;
        std::vector<QuantumState> qs;
        for (int j = 0; j < k; ++j) {
            ps.push_back(sample_pure(dim, derive_seed(seed, 4, j)));
            qs.push_back(ps.back());
        }
        const std::vector<Observable> xs(static_cast<std::size_t>(k), x);
        const ComplexMatrix g0 = gram_raw(xs, qs).matrix.matrix();
        const ComplexMatrix u = (seed >> 24) % 2 ? oracle::random_unitary(k, seed)
                                                 : ComplexMatrix(ComplexMatrix::Random(k, k));
        const auto ts = transform_states(u, ps, x);
        track(relmax(ts.gram.matrix(), u * g0 * u.adjoint()), "state law");
        if ((seed >> 24) % 2) track(rel(ts.gram.matrix().determinant().real(), g0.determinant().real()), "unitary det");
    }
    o.detail << kDraws << " draws, worst relative deviation " << fmt(worst);
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism() {
    Outcome o;
    const std::string cfg = R"({
      "seed": 42,
      "ensemble_size": 300,
      "urs": "all",
      "scan": {"dims": [2, 8], "n_obs": 3, "m": 3, "mixed": true}
    })";
    const auto a = cli::run(cli::Command::scan, cfg), b = cli::run(cli::Command::scan, cfg);
    o.require(a.exit_code == cli::kExitOk, "in-process exit code " + std::to_string(a.exit_code));
    o.require(a.report.dump(2) == b.report.dump(2), "in-process reports differ");

    const auto dir = std::filesystem::temp_directory_path() / "urlab_acceptance";
    std::filesystem::create_directories(dir);
    const auto conf = dir / "scan.json", r1 = dir / "r1.json", r2 = dir / "r2.json";
    std::ofstream(conf) << cfg;
    for (const auto& out : {r1, r2}) {
        const std::string cmd = std::string(URLAB_BIN) + " scan --config " + conf.string() + " --out " + out.string();
        const int rc = std::system(cmd.c_str());
        o.require(WIFEXITED(rc) && WEXITSTATUS(rc) == 0, "binary exit status");
    }
    const std::string d1 = slurp(r1), d2 = slurp(r2);
    o.require(!d1.empty() && d1 == d2, "binary reports differ");
    o.require(d1 == a.report.dump(2) + "\n", "binary and in-process reports differ");
    o.detail << "15 relations x 300 instances, two in-process and two binary runs, " << d1.size() << " bytes each";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"extended Schrodinger on (coherent, squeezed)", canonical_extended},
        {"entangled Heisenberg on (coherent, squeezed)", abstract_entangled},
        {"universal validity scan", universal_validity},
        {"reduction identities", reductions},
        {"characteristic inequalities on psd ensembles", lemma_suite},
        {"type_1_2a and type_1_2b independence", independence},
        {"saturation audit", remark_audit},
        {"coherent-fixed minimum", coherent_fixed},
        {"covariance laws", covariance_laws},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << ": " << criteria[k].first << " ("
                  << o.detail.str() << ") [" << fmt(seconds_since(t0)) << " s]" << std::endl;
    }
    std::cout << (failed ? "FAILED " : "ALL PASSED ") << criteria.size() - failed << "/" << criteria.size() << std::endl;
    return failed ? 1 : 0;
}
