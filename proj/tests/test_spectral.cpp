#include <catch_amalgamated.hpp>

#include <random>

#include "mcgc/spectral.hpp"
#include "test_helpers.hpp"

using namespace mcgc;
using Catch::Approx;
using testing_support::ar_chains;
using testing_support::random_chains;

TEST_CASE("embedding of a two-point series", "[spectral]") {
    const auto emb = build_embedding(bartlett_window(), Bandwidth::of(2), 2);
    REQUIRE(emb.wstar.size() == 4);
    CHECK(emb.wstar == std::vector<double>{1.0, 0.5, 0.0, 0.5});
    const double expected[] = {2.0, 1.0, 0.0, 1.0};
    for (int i = 0; i < 4; ++i) {
        CHECK(emb.eigenvalues[i].real() == Approx(expected[i]).margin(1e-15));
        CHECK(std::abs(emb.eigenvalues[i].imag()) < 1e-15);
    }
}

TEST_CASE("embedding structure", "[spectral]") {
    std::mt19937_64 gen(1);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + gen() % 500;
        const std::size_t b = 1 + gen() % n;
        const auto emb = build_embedding(bartlett_window(), Bandwidth::of(b), n);
        CHECK(emb.wstar[0] == 1.0);
        CHECK(emb.wstar[n] == 0.0);
        for (std::size_t j = 1; j < n; ++j) REQUIRE(emb.wstar[j] == emb.wstar[2 * n - j]);
        for (const auto& lam : emb.eigenvalues) REQUIRE(std::abs(lam.imag()) < 1e-9);
    }
    CHECK_THROWS_AS(build_embedding(bartlett_window(), Bandwidth::of(6), 5), BandwidthError);
}

TEST_CASE("DFT round trip", "[spectral]") {
    std::mt19937_64 gen(2);
    std::normal_distribution<double> z(0.0, 1.0);
    for (std::size_t N : {2u, 6u, 98u, 1000u, 4374u}) {
        std::vector<double> x(N);
        for (auto& v : x) v = z(gen);
        const auto back = fft::inverse_dft_real(fft::dft(x));
        double err = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            err += (back[i] - x[i]) * (back[i] - x[i]);
            norm += x[i] * x[i];
        }
        CHECK(std::sqrt(err / norm) < 1e-12);
    }
    // Against the defining sum.
    std::vector<double> x(12);
    for (auto& v : x) v = z(gen);
    const auto X = fft::dft(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
        std::complex<double> direct = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j)
            direct += x[j] * std::polar(1.0, -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(x.size()));
        CHECK(std::abs(direct - X[k]) < 1e-12);
    }
}

TEST_CASE("fast path on hand-computed inputs", "[spectral]") {
    const auto emb = build_embedding(bartlett_window(), Bandwidth::of(2), 2);
    Matrix a(2, 1);
    a << 1.0, -1.0;
    CHECK(fast_sv(a, emb)(0, 0) == Approx(0.5).epsilon(1e-14));
    const auto c = ChainSet::from_scalar_chains({{1.0, -1.0}});
    CHECK(sv_naive(c, 0, bartlett_window(), Bandwidth::of(2), Centering::local).matrix(0, 0) == 0.5);

    const Matrix zero = Matrix::Zero(2, 3);
    CHECK(fast_sv(zero, emb).isZero(0.0));
    CHECK_THROWS_AS(fast_sv(Matrix::Zero(3, 1), emb), ShapeError);
}

TEST_CASE("fast and naive paths agree", "[spectral]") {
    std::mt19937_64 gen(3);
    const auto w = bartlett_window();
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t m = 1 + gen() % 4, p = 1 + gen() % 4;
        const std::size_t n = 64 + gen() % 1500;
        const std::size_t b = 2 + gen() % (n / 2 - 1);
        const auto c = ar_chains(gen, m, n, p, 0.8, 2.0);
        const auto bw = Bandwidth::of(b);
        for (auto centering : {Centering::local, Centering::global}) {
            const auto naive = averaged_sv(c, w, bw, centering, Path::naive);
            const auto fast = averaged_sv(c, w, bw, centering, Path::fast);
            REQUIRE(relative_frobenius(fast.matrix, naive.matrix) < 1e-8);
            CHECK(fast.path == Path::fast);
        }
        const auto s = gen() % m;
        CHECK(relative_frobenius(sv_fast(c, s, w, bw, Centering::global).matrix,
                                 sv_naive(c, s, w, bw, Centering::global).matrix) < 1e-8);
    }
}

TEST_CASE("single-term and single-chain reductions", "[spectral]") {
    std::mt19937_64 gen(4);
    const auto w = bartlett_window();
    const auto c = random_chains(gen, 3, 100, 2, 1.0);
    for (std::size_t s = 0; s < 3; ++s)
        CHECK(sv_naive(c, s, w, Bandwidth::of(1), Centering::local).matrix == symmetrize(acvf(c, s, 0, Centering::local)));

    const auto one = ar_chains(gen, 1, 300, 2, 0.5);
    const auto b = Bandwidth::of(17);
    CHECK(sv_naive(one, 0, w, b, Centering::local).matrix == sv_naive(one, 0, w, b, Centering::global).matrix);
    CHECK(asv(one, w, b).matrix == sv_naive(one, 0, w, b, Centering::local).matrix);
    CHECK(gsv(one, w, b).matrix == asv(one, w, b).matrix);
    CHECK(relative_frobenius(gsv_fast(one, w, b).matrix, sv_fast(one, 0, w, b, Centering::local).matrix) < 1e-14);

    const auto twins = ChainSet::from_chains({one.chain(0), one.chain(0)});
    CHECK(relative_frobenius(asv(twins, w, b).matrix, sv_naive(one, 0, w, b, Centering::local).matrix) < 1e-14);
}

TEST_CASE("separated constant chains", "[spectral]") {
    const auto c = ChainSet::from_scalar_chains({{0, 0, 0, 0}, {4, 4, 4, 4}});
    const auto w = bartlett_window();
    CHECK(asv(c, w, Bandwidth::of(2)).matrix(0, 0) == 0.0);
    CHECK(gsv(c, w, Bandwidth::of(1)).matrix(0, 0) == 4.0);
    CHECK(gsv(c, w, Bandwidth::of(1), Path::fast).matrix(0, 0) == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("G-SV is the chain average of globally centered SVs", "[spectral]") {
    std::mt19937_64 gen(5);
    const auto w = bartlett_window();
    const auto c = ar_chains(gen, 4, 400, 3, 0.7, 1.0);
    const auto b = Bandwidth::of(20);
    Matrix avg = Matrix::Zero(3, 3);
    for (std::size_t s = 0; s < 4; ++s) avg += sv_naive(c, s, w, b, Centering::global).matrix;
    CHECK(relative_frobenius(gsv(c, w, b).matrix, avg / 4.0) < 1e-12);
    CHECK(gsv(c, w, b).estimator == Estimator::gsv);
    CHECK(asv(c, w, b).estimator == Estimator::asv);
}

TEST_CASE("outputs are symmetric", "[spectral]") {
    std::mt19937_64 gen(6);
    const auto w = bartlett_window();
    const auto c = ar_chains(gen, 3, 1000, 4, 0.9, 3.0);
    const auto b = Bandwidth::of(50);
    for (auto path : {Path::naive, Path::fast}) {
        for (auto centering : {Centering::local, Centering::global}) {
            const auto est = averaged_sv(c, w, b, centering, path);
            CHECK(est.matrix == est.matrix.transpose());
        }
    }
    // Before symmetrization the asymmetry is at rounding level.
    const auto emb = build_embedding(w, b, c.n());
    const Vector gbar = global_mean(c);
    const Matrix raw = fast_sv(c.chain(0).rowwise() - gbar.transpose(), emb);
    CHECK((raw - raw.transpose()).norm() < 1e-10 * raw.norm());
}

TEST_CASE("iid input estimates unit variance", "[spectral]") {
    std::mt19937_64 gen(7);
    const auto c = random_chains(gen, 1, 10000, 1);
    const double v = sv_naive(c, 0, bartlett_window(), Bandwidth::of(100), Centering::local).matrix(0, 0);
    CHECK(v > 0.8);
    CHECK(v < 1.2);
}

TEST_CASE("bandwidth and path selection", "[spectral]") {
    std::mt19937_64 gen(8);
    const auto c = random_chains(gen, 2, 10, 1);
    CHECK_THROWS_AS(gsv(c, bartlett_window(), Bandwidth::of(11)), BandwidthError);
    CHECK_NOTHROW(gsv(c, bartlett_window(), Bandwidth::of(10)));
    CHECK(select_path(63) == Path::naive);
    CHECK(select_path(64) == Path::fast);
    CHECK(estimator_by_name("gsv") == Estimator::gsv);
    CHECK_THROWS_AS(estimator_by_name("bm"), InputError);
}
