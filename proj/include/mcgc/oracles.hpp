#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"
#include "mcgc/models.hpp"

namespace mcgc {

/// Solves Psi = Phi Psi Phi^T + Omega through (I - Phi kron Phi) vec(Psi) = vec(Omega).
inline Matrix var_stationary_cov(const Matrix& phi, const Matrix& omega) {
    VarProcess{phi, omega}.validate();
    const auto p = phi.rows();
    const Matrix system = Matrix::Identity(p * p, p * p) - Eigen::kroneckerProduct(phi, phi).eval();
    Eigen::PartialPivLU<Matrix> lu(system);
    if (!(lu.rcond() > 1e-14)) throw IllConditioned("I - Phi kron Phi is numerically singular");
    const Vector vec_omega = Eigen::Map<const Vector>(omega.data(), p * p);
    const Vector vec_psi = lu.solve(vec_omega);
    return symmetrize(Eigen::Map<const Matrix>(vec_psi.data(), p, p));
}

inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

/// Truncated lag sum and a certified bound on what was left out.
struct LongRunSum {
    Matrix matrix;
    double tail_bound = 0.0;
    std::size_t lags = 0;  // K actually used
};

/**
 * sum_{|k| <= K} |k|^q Gamma(k) for Gamma(k) = Phi^k Psi, q in {0, 1}.
 *
 * K starts at `min_lags` and grows until the tail bound drops below
 * 1e-10 ||result||_F. The tail uses a block length L with
 * r = ||Phi^L||_2 < 1, so ||Phi^{K+1+i}|| <= ||Phi^{K+1}|| C r^{floor(i/L)}
 * with C = max_{j<L} ||Phi^j||.
 */
inline LongRunSum var_longrun(const Matrix& phi, const Matrix& psi, std::size_t min_lags, int q,
                              std::size_t max_lags = 1'000'000) {
    if (q != 0 && q != 1) throw InputError("q must be 0 or 1");
    if (min_lags < 1) throw InputError("truncation lag must be at least 1");
    const auto p = phi.rows();

    std::size_t block = 1;
    Matrix power = phi;
    double block_norm = spectral_norm(power);
    double block_const = 1.0;
    Matrix running = Matrix::Identity(p, p);
    while (!(block_norm < 1.0)) {
        running = power;
        block_const = std::max(block_const, spectral_norm(running));
        power = power * phi;
        ++block;
        block_norm = spectral_norm(power);
        if (block > 10'000) throw TailError("no power of Phi up to 10000 has norm below 1");
    }
    const double L = static_cast<double>(block), r = block_norm;
    const double psi_norm = spectral_norm(psi) * std::sqrt(static_cast<double>(p));  // bounds ||.||_F

    Matrix result = q == 0 ? psi : Matrix(Matrix::Zero(p, p));
    Matrix phi_k = Matrix::Identity(p, p);
    for (std::size_t k = 1;; ++k) {
        phi_k = phi_k * phi;
        const Matrix gamma = phi_k * psi;
        const double weight = q == 0 ? 1.0 : static_cast<double>(k);
        result += weight * (gamma + gamma.transpose());
        if (k >= min_lags && (k % 32 == 0 || k == min_lags)) {
            const double head = spectral_norm(phi_k * phi);
            const double K = static_cast<double>(k);
            const double series = q == 0 ? L / (1.0 - r)
                                         : L * ((K + 1.0 + 0.5 * (L - 1.0)) / (1.0 - r) + L * r / ((1.0 - r) * (1.0 - r)));
            const double tail = 2.0 * psi_norm * head * block_const * series;
            if (tail <= 1e-10 * result.norm()) return LongRunSum{result, tail, k};
        }
        if (k >= max_lags) throw TailError("truncated lag sum did not converge by K=" + std::to_string(max_lags));
    }
}

/// Ground truth for a stable VAR(1): Psi, Sigma and Phi^(1) with tail bounds.
struct OracleVar {
    Matrix phi;
    Matrix omega;
    Matrix psi;
    Matrix sigma;
    Matrix phi1;
    double sigma_tail = 0.0;
    double phi1_tail = 0.0;
    std::size_t lags = 0;

    /// Gamma(k) = Phi^k Psi; negative lags are transposes.
    Matrix acvf(long k) const {
        const auto abs_k = static_cast<std::size_t>(k < 0 ? -k : k);
        Matrix power = Matrix::Identity(phi.rows(), phi.cols());
        for (std::size_t j = 0; j < abs_k; ++j) power = power * phi;
        const Matrix g = power * psi;
        return k < 0 ? Matrix(g.transpose()) : g;
    }

    /// Lag-k autocorrelation of component i.
    double acf(std::size_t i, long k) const {
        const auto ii = static_cast<Eigen::Index>(i);
        return acvf(k)(ii, ii) / psi(ii, ii);
    }

    double lyapunov_residual() const {
        return (psi - phi * psi * phi.transpose() - omega).norm() / psi.norm();
    }
};

inline OracleVar make_oracle(const VarProcess& proc, std::size_t min_lags = 64) {
    OracleVar o;
    o.phi = proc.phi;
    o.omega = proc.omega;
    o.psi = var_stationary_cov(proc.phi, proc.omega);
    const auto sig = var_longrun(o.phi, o.psi, min_lags, 0);
    const auto ph = var_longrun(o.phi, o.psi, min_lags, 1);
    o.sigma = sig.matrix;
    o.sigma_tail = sig.tail_bound;
    o.phi1 = ph.matrix;
    o.phi1_tail = ph.tail_bound;
    o.lags = std::max(sig.lags, ph.lags);
    return o;
}

inline Matrix var_acvf(const OracleVar& o, long k) { return o.acvf(k); }

struct QuadratureOptions {
    double tolerance = 1e-10;  // relative to the normalizing constant
    double box_scale = 1.0;    // enlarges the integration box about its center
    std::size_t panels = 64;   // initial panels per axis
    int max_depth = 20;
};

struct BoomerangMoments {
    std::array<double, 2> mean{};
    double log_normalizer = 0.0;
    std::array<double, 2> box{};  // [lo, hi], shared by both axes
};

namespace detail {

template <std::size_t D>
using Vec = std::array<double, D>;

template <std::size_t D, class F>
struct AdaptiveSimpson {
    F f;
    double tol;
    int max_depth;
    bool failed = false;

    static Vec<D> simpson(double a, double b, const Vec<D>& fa, const Vec<D>& fm, const Vec<D>& fb) {
        Vec<D> out;
        for (std::size_t d = 0; d < D; ++d) out[d] = (b - a) / 6.0 * (fa[d] + 4.0 * fm[d] + fb[d]);
        return out;
    }

    Vec<D> recurse(double a, double b, const Vec<D>& fa, const Vec<D>& fm, const Vec<D>& fb, const Vec<D>& whole,
                   double eps, int depth) {
        const double m = 0.5 * (a + b);
        const Vec<D> flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
        const Vec<D> left = simpson(a, m, fa, flm, fm), right = simpson(m, b, fm, frm, fb);
        double err = 0.0;
        for (std::size_t d = 0; d < D; ++d) err = std::max(err, std::abs(left[d] + right[d] - whole[d]));
        if (err <= 15.0 * eps) {
            Vec<D> out;
            for (std::size_t d = 0; d < D; ++d) out[d] = left[d] + right[d] + (left[d] + right[d] - whole[d]) / 15.0;
            return out;
        }
        if (depth >= max_depth) {
            failed = true;
            Vec<D> out;
            for (std::size_t d = 0; d < D; ++d) out[d] = left[d] + right[d];
            return out;
        }
        const Vec<D> l = recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1);
        const Vec<D> r = recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
        Vec<D> out;
        for (std::size_t d = 0; d < D; ++d) out[d] = l[d] + r[d];
        return out;
    }

    Vec<D> integrate(double a, double b, std::size_t panels) {
        Vec<D> total{};
        const double h = (b - a) / static_cast<double>(panels);
        for (std::size_t j = 0; j < panels; ++j) {
            const double lo = a + static_cast<double>(j) * h, hi = lo + h;
            const Vec<D> fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
            const Vec<D> part = recurse(lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb), tol / static_cast<double>(panels), 0);
            for (std::size_t d = 0; d < D; ++d) total[d] += part[d];
        }
        return total;
    }
};

template <std::size_t D, class F>
AdaptiveSimpson<D, F> make_simpson(F f, double tol, int max_depth) {
    return AdaptiveSimpson<D, F>{std::move(f), tol, max_depth};
}

}  // namespace detail

/**
 * Mean of the boomerang density by nested adaptive Simpson quadrature.
 *
 * The density is scaled by its maximum (found by coordinate ascent on the
 * Gaussian full conditionals). The square box grows until the density on its
 * boundary is below 1e-14 of the maximum; the boundary maximum along each
 * edge is exact because every conditional is Gaussian.
 */
inline BoomerangMoments boomerang_mean(const BoomerangTarget& t, const QuadratureOptions& opt = {}) {
    t.validate();
    auto cond_mean = [&](double other) { return (t.B * other + t.C) / (t.A * other * other + 1.0); };

    // Mode: best point on a coarse grid, then coordinate ascent.
    double bx = 0.0, by = 0.0, best = -INFINITY;
    for (double x = -40.0; x <= 40.0; x += 0.25)
        for (double y = -40.0; y <= 40.0; y += 0.25)
            if (const double v = t.log_density(x, y); v > best) { best = v; bx = x; by = y; }
    for (int it = 0; it < 10000; ++it) {
        const double nx = cond_mean(by), ny = cond_mean(nx);
        const bool done = std::abs(nx - bx) + std::abs(ny - by) < 1e-15 * (1.0 + std::abs(bx) + std::abs(by));
        bx = nx;
        by = ny;
        if (done) break;
    }
    const double log_max = std::max(best, t.log_density(bx, by));

    auto edge_max = [&](double fixed, double lo, double hi) {
        const double y = std::clamp(cond_mean(fixed), lo, hi);
        return std::max({t.log_density(fixed, y), t.log_density(fixed, lo), t.log_density(fixed, hi)});
    };
    const double threshold = log_max + std::log(1e-14);
    double lo = std::min(bx, by) - 5.0, hi = std::max(bx, by) + 5.0;
    for (int it = 0; it < 10000; ++it) {
        const bool lo_ok = edge_max(lo, lo, hi) < threshold;
        const bool hi_ok = edge_max(hi, lo, hi) < threshold;
        if (lo_ok && hi_ok) break;
        if (!lo_ok) lo -= 1.0;
        if (!hi_ok) hi += 1.0;
        if (it == 9999) throw QuadratureError("could not find a box containing the boomerang density");
    }
    const double center = 0.5 * (lo + hi), half = 0.5 * (hi - lo) * opt.box_scale;
    lo = center - half;
    hi = center + half;

    bool failed = false;
    auto run = [&](double abs_tol) {
        auto outer = detail::make_simpson<3>(
            [&](double x) {
                auto inner = detail::make_simpson<2>(
                    [&](double y) {
                        const double f = std::exp(t.log_density(x, y) - log_max);
                        return detail::Vec<2>{f, f * y};
                    },
                    abs_tol / (hi - lo), opt.max_depth);
                const auto g = inner.integrate(lo, hi, opt.panels);
                failed = failed || inner.failed;
                return detail::Vec<3>{g[0], x * g[0], g[1]};
            },
            abs_tol, opt.max_depth);
        const auto res = outer.integrate(lo, hi, opt.panels);
        failed = failed || outer.failed;
        return res;
    };
    // The first pass only fixes the scale of the normalizer, so the second
    // can use a tolerance relative to it.
    const auto first = run(opt.tolerance);
    failed = false;
    const auto res = run(opt.tolerance * std::max(first[0], 1e-300));
    if (failed) throw QuadratureError("adaptive Simpson hit the depth cap before reaching tolerance");
    if (!(res[0] > 0.0)) throw QuadratureError("normalizing constant is not positive");
    return BoomerangMoments{{res[1] / res[0], res[2] / res[0]}, std::log(res[0]) + log_max, {lo, hi}};
}

}  // namespace mcgc
