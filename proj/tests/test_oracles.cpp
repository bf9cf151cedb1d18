#include <catch_amalgamated.hpp>

#include <cmath>

#include "mcgc/oracles.hpp"

using namespace mcgc;
using Catch::Approx;

namespace {

// Scalar AR(1) with unit innovations.
double ar_psi(double phi) { return 1.0 / (1.0 - phi * phi); }
double ar_sigma(double phi) { return ar_psi(phi) * (1.0 + phi) / (1.0 - phi); }
double ar_phi1(double phi) { return 2.0 * ar_psi(phi) * phi / ((1.0 - phi) * (1.0 - phi)); }

}  // namespace

TEST_CASE("stationary covariance", "[oracles]") {
    Matrix omega(2, 2);
    omega << 2.0, 0.3, 0.3, 1.0;
    CHECK(relative_frobenius(var_stationary_cov(Matrix::Zero(2, 2), omega), omega) < 1e-15);
    CHECK(var_stationary_cov(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 1.0))(0, 0) == Approx(4.0 / 3.0).epsilon(1e-14));

    const auto o = make_oracle(benchmark_var_process());
    CHECK(o.lyapunov_residual() < 1e-10);
    CHECK(o.psi == o.psi.transpose());

    Matrix phi(3, 3);
    phi << 0.5, 0.2, 0.0, -0.1, 0.4, 0.3, 0.0, 0.1, -0.6;
    const auto o3 = make_oracle(VarProcess{phi, Matrix::Identity(3, 3)});
    CHECK(o3.lyapunov_residual() < 1e-12);

    CHECK_THROWS_AS(var_stationary_cov(Matrix::Identity(1, 1), Matrix::Identity(1, 1)), Unstable);
}

TEST_CASE("autocovariance powers", "[oracles]") {
    const auto o = make_oracle(ar1_process(0.5, 1.0));
    CHECK(var_acvf(o, 0)(0, 0) == Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(var_acvf(o, 2)(0, 0) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(o.acf(0, 3) == Approx(0.125).epsilon(1e-14));

    const auto v = make_oracle(benchmark_var_process());
    CHECK(v.acvf(-1) == v.acvf(1).transpose());
    CHECK(v.acvf(0) == v.psi);
    CHECK(relative_frobenius(v.acvf(3), v.phi * v.phi * v.phi * v.psi) < 1e-14);
}

TEST_CASE("truncated long-run sums match closed forms", "[oracles]") {
    for (double phi : {0.0, 0.3, 0.5, 0.7, 0.9, -0.6}) {
        const auto o = make_oracle(ar1_process(phi, 1.0));
        CHECK(o.sigma(0, 0) == Approx(ar_sigma(phi)).epsilon(1e-9));
        if (phi == 0.0) {
            CHECK(o.phi1(0, 0) == 0.0);
        } else {
            CHECK(o.phi1(0, 0) == Approx(ar_phi1(phi)).epsilon(1e-9));
        }
        CHECK(o.sigma_tail <= 1e-10 * std::abs(o.sigma(0, 0)));
    }
    CHECK(make_oracle(ar1_process(0.5, 1.0)).sigma(0, 0) == Approx(4.0).epsilon(1e-12));
    CHECK(make_oracle(ar1_process(0.5, 1.0)).phi1(0, 0) == Approx(16.0 / 3.0).epsilon(1e-12));

    Matrix omega(2, 2);
    omega << 1.0, 0.4, 0.4, 2.0;
    const auto white = make_oracle(VarProcess{Matrix::Zero(2, 2), omega});
    CHECK(relative_frobenius(white.sigma, omega) < 1e-15);
    CHECK(white.phi1.isZero(0.0));
}

TEST_CASE("long-run covariance of a VAR(1) has a closed form", "[oracles]") {
    // Sigma = (I - Phi)^{-1} Psi + Psi (I - Phi)^{-T} - Psi.
    const auto o = make_oracle(benchmark_var_process());
    const Matrix I = Matrix::Identity(2, 2);
    const Matrix inv = (I - o.phi).inverse();
    const Matrix closed = inv * o.psi + o.psi * inv.transpose() - o.psi;
    CHECK(relative_frobenius(o.sigma, closed) < 1e-9);
}

TEST_CASE("variance of a chain mean to second order", "[oracles]") {
    // Exact Var(mean of n draws) = n^-1 sum_{|k|<n} (1 - |k|/n) Gamma(k); the n^-2 term is -Phi.
    const auto o = make_oracle(ar1_process(0.5, 1.0));
    for (const long n : {200L, 1000L}) {
        double var = 0.0;
        for (long k = -(n - 1); k <= n - 1; ++k)
            var += (1.0 - std::abs(static_cast<double>(k)) / static_cast<double>(n)) * o.acvf(k)(0, 0);
        var /= static_cast<double>(n);
        const double nn = static_cast<double>(n);
        CHECK(nn * nn * (var - o.sigma(0, 0) / nn) == Approx(-o.phi1(0, 0)).epsilon(1e-9));
    }
}

TEST_CASE("tail bounds shrink with the truncation lag", "[oracles]") {
    const auto o = make_oracle(ar1_process(0.5, 1.0));
    const auto short_sum = var_longrun(o.phi, o.psi, 40, 0, 40);
    const auto longer = var_longrun(o.phi, o.psi, 60, 0, 60);
    CHECK(longer.tail_bound < short_sum.tail_bound);
    CHECK(longer.tail_bound / short_sum.tail_bound <= std::pow(0.5, 20) * 1.0001);
    const auto slow = make_oracle(ar1_process(0.9, 1.0));
    CHECK_THROWS_AS(var_longrun(slow.phi, slow.psi, 10, 0, 20), TailError);
}

TEST_CASE("boomerang quadrature", "[oracles]") {
    const auto gauss = boomerang_mean(BoomerangTarget{0.0, 0.0, 2.5});
    CHECK(gauss.mean[0] == Approx(2.5).margin(1e-9));
    CHECK(gauss.mean[1] == Approx(2.5).margin(1e-9));
    // log of the Gaussian normalizer: 2 pi exp(C^2).
    CHECK(gauss.log_normalizer == Approx(std::log(2.0 * M_PI) + 2.5 * 2.5).epsilon(1e-9));

    for (const auto& t : {BoomerangTarget::setting1(), BoomerangTarget::setting2(), BoomerangTarget{0.5, 2.0, 3.0}}) {
        const auto fine = boomerang_mean(t);
        CHECK(std::abs(fine.mean[0] - fine.mean[1]) < 1e-9);
        QuadratureOptions coarse;
        coarse.tolerance = 1e-8;
        coarse.panels = 32;
        const auto rough = boomerang_mean(t, coarse);
        CHECK(std::abs(rough.mean[0] - fine.mean[0]) < 1e-8);

        QuadratureOptions wide;
        wide.box_scale = 1.25;
        CHECK(std::abs(boomerang_mean(t, wide).mean[0] - fine.mean[0]) < 1e-8);
    }
}

TEST_CASE("boomerang means are pinned", "[oracles]") {
    CHECK(boomerang_mean(BoomerangTarget::setting1()).mean[0] == Approx(3.90415373994).margin(1e-9));
    CHECK(boomerang_mean(BoomerangTarget::setting2()).mean[0] == Approx(3.60356119608).margin(1e-9));
}
