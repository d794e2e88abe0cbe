#include "urlab/kernels.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace urlab::kernels;

namespace {

std::vector<cplx> random_vec(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(n);
    for (auto& z : v) z = {g(rng), g(rng)};
    return v;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("scalar cdot matches the textbook sum") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {0u, 1u, 2u, 7u, 64u}) {
        const auto a = random_vec(n, rng), b = random_vec(n, rng);
        cplx ref = 0.0;
        for (std::size_t i = 0; i < n; ++i) ref += std::conj(a[i]) * b[i];
        CHECK(std::abs(scalar_table().cdot(a, b) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
    }
}

TEST_CASE("scalar gemv and axpy match direct loops") {
    std::mt19937_64 rng(2);
    const std::size_t rows = 5, cols = 3;
    const auto a = random_vec(rows * cols, rng), x = random_vec(cols, rng);
    std::vector<cplx> y(rows), ref(rows, 0.0);
    scalar_table().gemv(a.data(), rows, cols, x, y);
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) ref[i] += a[j * rows + i] * x[j];
    CHECK(max_diff(y, ref) <= 1e-13);

    auto z = random_vec(rows, rng);
    auto zref = z;
    const cplx alpha{0.3, -1.2};
    scalar_table().axpy(alpha, ref, z);
    for (std::size_t i = 0; i < rows; ++i) zref[i] += alpha * ref[i];
    CHECK(max_diff(z, zref) <= 1e-13);
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
    const KernelTable* v = avx2_table();
    if (!v || !cpu_has_avx2_fma()) {
        MESSAGE("AVX2 variant unavailable on this host; equivalence not exercised");
        return;
    }
    const KernelTable& s = scalar_table();
    std::mt19937_64 rng(3);
    for (std::size_t n = 0; n <= 41; ++n) {
        const auto a = random_vec(n, rng), b = random_vec(n, rng);
        const cplx rs = s.cdot(a, b), rv = v->cdot(a, b);
        CHECK(std::abs(rs - rv) <= 1e-13 * (1.0 + std::sqrt(double(n)) * 4.0));

        auto y1 = random_vec(n, rng);
        auto y2 = y1;
        const cplx alpha{-0.7, 0.25};
        s.axpy(alpha, a, y1);
        v->axpy(alpha, a, y2);
        CHECK(max_diff(y1, y2) <= 1e-14);
    }
    for (std::size_t rows : {1u, 2u, 3u, 8u, 17u, 64u}) {
        for (std::size_t cols : {1u, 2u, 3u, 5u, 64u}) {
            const auto a = random_vec(rows * cols, rng), x = random_vec(cols, rng);
            std::vector<cplx> y1(rows), y2(rows);
            s.gemv(a.data(), rows, cols, x, y1);
            v->gemv(a.data(), rows, cols, x, y2);
            CHECK(max_diff(y1, y2) <= 1e-12);
        }
    }
}

TEST_CASE("dispatch picks a consistent table") {
    const KernelTable& t = active();
    CHECK((t.name == "scalar" || t.name == "avx2"));
    if (t.name == "avx2") CHECK(cpu_has_avx2_fma());
}
