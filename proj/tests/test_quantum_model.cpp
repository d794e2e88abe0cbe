#include "oracles.hpp"
#include "urlab/errors.hpp"
#include "urlab/quantum_model.hpp"

#include <doctest.h>

#include <cmath>

using namespace urlab;

namespace {

const cplx I{0.0, 1.0};

struct Gauss {
    double mq, mp, vq, vp, cov;
};

Gauss gaussian_moments(const PureState& s) {
    const HilbertDim n(s.dim());
    const auto [q, p] = fock_operators(n);
    const auto m = oracle::moments(q.matrix.matrix(), p.matrix.matrix(), s.amplitudes());
    return {oracle::expect(q.matrix.matrix(), s.amplitudes()).real(), oracle::expect(p.matrix.matrix(), s.amplitudes()).real(),
            m.vx, m.vy, m.cov};
}

}  // namespace

TEST_CASE("HilbertDim bounds") {
    CHECK_NOTHROW(HilbertDim(2));
    CHECK_NOTHROW(HilbertDim(512));
    CHECK_THROWS_AS(HilbertDim(1), InputError);
    CHECK_THROWS_AS(HilbertDim(513), InputError);
}

TEST_CASE("quadratures: N = 2 matrix, vacuum moments, canonical commutator") {
    const auto [q2, p2] = fock_operators(HilbertDim(2));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(q2.matrix.matrix()(0, 1) - h) <= 1e-15);
    CHECK(std::abs(q2.matrix.matrix()(1, 0) - h) <= 1e-15);
    CHECK(std::abs(q2.matrix.matrix()(0, 0)) == 0.0);
    CHECK(q2.name == "q");
    CHECK(p2.name == "p");

    const HilbertDim n(64);
    const auto [q, p] = fock_operators(n);
    const auto vac = fock_state(0, n);
    CHECK(std::abs(oracle::expect(q.matrix.matrix(), vac.amplitudes())) <= 1e-15);
    CHECK(std::abs(oracle::expect(q.matrix.matrix() * q.matrix.matrix(), vac.amplitudes()) - 0.5) <= 1e-15);

    const ComplexMatrix comm = q.matrix.matrix() * p.matrix.matrix() - p.matrix.matrix() * q.matrix.matrix();
    CHECK((comm.topLeftCorner(63, 63) - I * ComplexMatrix::Identity(63, 63)).cwiseAbs().maxCoeff() <= 1e-12);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = sample_gaussian(n, seed, 1.0, 0.4);
        CHECK(std::abs(oracle::expect(comm, s.amplitudes()) - I) <= 1e-10);
    }
}

TEST_CASE("quad_plus and quad_mix are the stated quadratic forms") {
    const HilbertDim n(16);
    const auto [q, p] = fock_operators(n);
    const ComplexMatrix Q = q.matrix.matrix(), P = p.matrix.matrix();
    CHECK((quad_plus(n).matrix.matrix() - (P * P - Q * Q)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((quad_mix(n).matrix.matrix() - (P * Q + Q * P)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("coherent states") {
    const HilbertDim n(64);
    const auto vac = coherent_state(0.0, n);
    CHECK((vac.amplitudes() - ComplexVector::Unit(64, 0)).norm() <= 1e-15);

    const auto c1 = coherent_state(1.0, n);
    CHECK(std::abs(gaussian_moments(c1).mq - std::sqrt(2.0)) <= 1e-10);

    const auto c = coherent_state({1.0, 1.0}, n);
    const auto g = gaussian_moments(c);
    CHECK(std::abs(g.vq * g.vp - 0.25) <= 1e-9);
    CHECK(std::abs(g.mp - std::sqrt(2.0)) <= 1e-10);
    CHECK(std::abs(g.cov) <= 1e-9);

    for (cplx a : {cplx(0.3, -0.2), cplx(-1.5, 0.7), cplx(2.0, 0.0)}) {
        const auto s = coherent_state(a, n);
        CHECK((s.amplitudes() - oracle::coherent(a, 64)).norm() <= 1e-12);
        const auto m = gaussian_moments(s);
        CHECK(std::abs(m.vq - 0.5) <= 1e-9);
        CHECK(std::abs(m.vp - 0.5) <= 1e-9);
        CHECK(std::abs(m.mq - std::sqrt(2.0) * a.real()) <= 1e-9);
    }
}

TEST_CASE("truncation error names the required dimension") {
    try {
        coherent_state(4.0, HilbertDim(16));
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.required_dim() > 16);
        CHECK_NOTHROW(coherent_state(4.0, HilbertDim(e.required_dim())));
        CHECK_THROWS_AS(coherent_state(4.0, HilbertDim(e.required_dim() - 1)), TruncationError);
    }
    CHECK_THROWS_AS(squeezed_state(0.0, 1.0, 0.0, HilbertDim(64)), TruncationError);
    CHECK_NOTHROW(squeezed_state(0.0, 1.0, 0.0, HilbertDim(128)));
}

TEST_CASE("squeezed states") {
    const HilbertDim n(64);
    const auto zero = squeezed_state({0.4, -0.3}, 0.0, 1.2, n);
    CHECK((zero.amplitudes() - coherent_state({0.4, -0.3}, n).amplitudes()).norm() <= 1e-12);

    const auto s = squeezed_state(0.0, 0.5, 0.0, n);
    const auto g = gaussian_moments(s);
    CHECK(std::abs(g.vq - std::exp(-1.0) / 2) <= 1e-8);
    CHECK(std::abs(g.vp - std::exp(1.0) / 2) <= 1e-8);
    CHECK(std::abs(g.cov) <= 1e-8);

    for (double r : {0.2, -0.45, 0.6}) {
        for (double phi : {0.0, 0.9, 2.5}) {
            const auto v = squeezed_state(0.0, r, phi, n);
            CHECK((v.amplitudes() - oracle::squeezed_vacuum(r, phi, 64)).norm() <= 1e-12);
        }
    }

    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto st = sample_gaussian(n, seed, 1.2, 0.5);
        const auto m = gaussian_moments(st);
        CHECK(std::abs(m.vq * m.vp - m.cov * m.cov - 0.25) <= 1e-8);
    }
}

TEST_CASE("displaced squeezed means follow the displacement") {
    const HilbertDim n(64);
    const cplx a{0.7, -0.4};
    const auto m = gaussian_moments(squeezed_state(a, 0.3, 1.1, n));
    CHECK(std::abs(m.mq - std::sqrt(2.0) * a.real()) <= 1e-10);
    CHECK(std::abs(m.mp - std::sqrt(2.0) * a.imag()) <= 1e-10);
}

TEST_CASE("truncation monotonicity from N = 64 to N = 128") {
    for (double re : {-2.0, 0.0, 1.4}) {
        for (double im : {0.0, 1.4}) {
            if (std::abs(cplx(re, im)) > 2.0) continue;
            for (double r : {0.0, 0.25, -0.5}) {
                const auto a = gaussian_moments(squeezed_state({re, im}, r, 0.4, HilbertDim(64)));
                const auto b = gaussian_moments(squeezed_state({re, im}, r, 0.4, HilbertDim(128)));
                CHECK(std::abs(a.mq - b.mq) < 1e-10);
                CHECK(std::abs(a.mp - b.mp) < 1e-10);
                CHECK(std::abs(a.vq - b.vq) < 1e-10);
                CHECK(std::abs(a.vp - b.vp) < 1e-10);
                CHECK(std::abs(a.cov - b.cov) < 1e-10);
            }
        }
    }
}

TEST_CASE("spin operators") {
    const auto half = spin_operators(1);
    ComplexMatrix sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0, 1, 1, 0;
    sy << 0, -I, I, 0;
    sz << 1, 0, 0, -1;
    CHECK((half.jx.matrix.matrix() - 0.5 * sx).norm() <= 1e-15);
    CHECK((half.jy.matrix.matrix() - 0.5 * sy).norm() <= 1e-15);
    CHECK((half.jz.matrix.matrix() - 0.5 * sz).norm() <= 1e-15);

    for (int tj = 1; tj <= 12; ++tj) {
        const auto s = spin_operators(tj);
        const ComplexMatrix x = s.jx.matrix.matrix(), y = s.jy.matrix.matrix(), z = s.jz.matrix.matrix();
        CHECK((x * y - y * x - I * z).cwiseAbs().maxCoeff() <= 1e-14 * tj * tj);
        CHECK((y * z - z * y - I * x).cwiseAbs().maxCoeff() <= 1e-14 * tj * tj);
        CHECK((z * x - x * z - I * y).cwiseAbs().maxCoeff() <= 1e-14 * tj * tj);
        const double j = tj / 2.0;
        const ComplexMatrix cas = x * x + y * y + z * z;
        CHECK((cas - j * (j + 1) * ComplexMatrix::Identity(tj + 1, tj + 1)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const auto up = spin_state(1, 1);
    CHECK(std::abs(oracle::expect(half.jz.matrix.matrix(), up.amplitudes()) - 0.5) <= 1e-15);
}

TEST_CASE("samplers: determinism and type invariants") {
    const auto a = sample_pure(4, 7), b = sample_pure(4, 7);
    CHECK(a.amplitudes() == b.amplitudes());
    CHECK(std::abs(a.amplitudes().norm() - 1.0) <= 1e-12);
    CHECK(sample_pure(4, 8).amplitudes() != a.amplitudes());

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto rho = sample_density(4, seed);
        CHECK(std::abs(rho.matrix().matrix().trace() - 1.0) <= 1e-12);
        CHECK(min_eigenvalue(rho.matrix()) >= -1e-12);
        const auto h = sample_hermitian(3, seed);
        CHECK((h.matrix() - h.matrix().adjoint()).norm() == 0.0);
        CHECK(min_eigenvalue(sample_psd(5, seed)) >= -1e-12);
    }
    const auto v1 = sample(SampleKind::density, 5, 3);
    const auto v2 = sample(SampleKind::density, 5, 3);
    CHECK(std::get<DensityMatrix>(std::get<QuantumState>(v1)).matrix().matrix() ==
          std::get<DensityMatrix>(std::get<QuantumState>(v2)).matrix().matrix());
    CHECK(std::holds_alternative<HermitianMatrix>(sample(SampleKind::psd, 3, 1)));
    CHECK_THROWS_AS(sample_pure(1, 0), InputError);
}

TEST_CASE("state validation") {
    ComplexVector v(2);
    v << 1.0, 1.0;
    CHECK_THROWS_AS(PureState::from(v), InputError);
    CHECK(std::abs(PureState::from(v, "x", true).amplitudes().norm() - 1.0) <= 1e-15);
    ComplexMatrix rho(2, 2);
    rho << 0.5, 0, 0, 0.4;
    CHECK_THROWS_AS(DensityMatrix::from(rho), InputError);
    rho << 1.2, 0, 0, -0.2;
    CHECK_THROWS_AS(DensityMatrix::from(rho), InputError);
    const auto dm = DensityMatrix::from_pure(fock_state(1, HilbertDim(3)));
    CHECK(std::abs(dm.matrix().matrix()(1, 1) - 1.0) <= 1e-15);
}
