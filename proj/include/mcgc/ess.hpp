#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "mcgc/acvf.hpp"
#include "mcgc/chains.hpp"
#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"
#include "mcgc/spectral.hpp"

namespace mcgc {

namespace detail {

// Regularized lower incomplete gamma P(a, x): series for x < a + 1,
// Lentz continued fraction for Q otherwise.
inline double gamma_p(double a, double x) {
    if (x <= 0.0) return 0.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a, sum = term, ap = a;
        for (int it = 0; it < 10000; ++it) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return sum * std::exp(log_prefix);
    }
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return 1.0 - std::exp(log_prefix) * h;
}

}  // namespace detail

/// CDF of the chi-squared distribution with `dof` degrees of freedom.
inline double chi2_cdf(double x, double dof) { return detail::gamma_p(0.5 * dof, 0.5 * x); }

/**
 * Inverse CDF of chi-squared: Wilson-Hilferty start, then safeguarded
 * Newton on the regularized incomplete gamma function.
 */
inline double chi2_quantile(double level, double dof) {
    if (!(level > 0.0 && level < 1.0)) throw InputError("chi-squared level must lie in (0, 1)");
    if (!(dof > 0.0)) throw InputError("chi-squared degrees of freedom must be positive");

    auto normal_quantile_rough = [](double u) {
        // Abramowitz-Stegun 26.2.23, |error| < 4.5e-4.
        const double pp = u < 0.5 ? u : 1.0 - u;
        const double t = std::sqrt(-2.0 * std::log(pp));
        const double z = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) / (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
        return u < 0.5 ? -z : z;
    };
    const double z = normal_quantile_rough(level);
    const double h = 2.0 / (9.0 * dof);
    double x = dof * std::pow(std::max(1.0 - h + z * std::sqrt(h), 1e-3), 3.0);

    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
        const double f = chi2_cdf(x, dof) - level;
        if (f < 0.0) lo = x; else hi = x;
        const double log_pdf = (0.5 * dof - 1.0) * std::log(x) - 0.5 * x - 0.5 * dof * std::log(2.0) - std::lgamma(0.5 * dof);
        double next = x - f / std::exp(log_pdf);
        if (!(next > lo && next < hi) || !std::isfinite(next)) next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x;
        if (std::abs(next - x) <= 1e-14 * std::max(1.0, x)) return next;
        x = next;
    }
    return x;
}

/// Chain average of the locally-centered lag-0 covariances.
inline Matrix lag0_local(const ChainSet& c) {
    const auto p = static_cast<Eigen::Index>(c.p());
    Matrix sum = Matrix::Zero(p, p);
    for (std::size_t s = 0; s < c.m(); ++s) sum += acvf(c, s, 0, Centering::local);
    return sum / static_cast<double>(c.m());
}

struct EssResult {
    double ess = 0.0;
    Matrix lag0;
    SvEstimate sigma;
    double mn = 0.0;

    double per_sample() const { return ess / mn; }
};

namespace detail {

/// log det of a symmetric matrix; nullopt-like NaN when not positive.
inline double log_det_spd(const Matrix& a) {
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(a), Eigen::EigenvaluesOnly).eigenvalues();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(ev(i) > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        log_det += std::log(ev(i));
    }
    // Determinants at or below 1e-300 count as nonpositive.
    if (log_det <= std::log(1e-300)) return std::numeric_limits<double>::quiet_NaN();
    return log_det;
}

}  // namespace detail

/// mn (det(lag0) / det(sigma))^(1/p), with lag0 the locally-centered average.
inline EssResult ess(const ChainSet& c, const SvEstimate& sigma) {
    const Matrix lag0 = lag0_local(c);
    if (sigma.matrix.rows() != lag0.rows() || sigma.matrix.cols() != lag0.cols())
        throw ShapeError("sigma estimate does not match the chain dimension");
    const double log_det_sigma = detail::log_det_spd(sigma.matrix);
    if (std::isnan(log_det_sigma))
        throw IndefiniteSigma("the long-run covariance estimate is not positive definite; increase n");
    const double log_det_lag0 = detail::log_det_spd(lag0);
    if (std::isnan(log_det_lag0)) throw DegenerateLag0("the lag-0 covariance is singular");
    const double mn = static_cast<double>(c.m() * c.n());
    const double p = static_cast<double>(c.p());
    return EssResult{mn * std::exp((log_det_lag0 - log_det_sigma) / p), lag0, sigma, mn};
}

/// Ellipsoid {mu : (center - mu)^T scale^{-1} (center - mu) <= chi2_quantile}.
struct WaldRegion {
    Vector center;
    Matrix scale;  // Sigma-hat / (mn)
    double level = 0.95;
    double chi2_quantile = 0.0;
};

inline WaldRegion wald_region(const ChainSet& c, const SvEstimate& sigma, double level = 0.95) {
    const double mn = static_cast<double>(c.m() * c.n());
    return WaldRegion{global_mean(c), symmetrize(sigma.matrix) / mn, level,
                      mcgc::chi2_quantile(level, static_cast<double>(c.p()))};
}

inline double wald_statistic(const WaldRegion& region, const Vector& mu) {
    if (mu.size() != region.center.size()) throw ShapeError("mu has the wrong dimension");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(region.scale));
    const Vector& ev = eig.eigenvalues();
    if (!(ev.minCoeff() > 0.0)) throw SingularCovariance("Wald region scale matrix is not positive definite");
    const Vector z = eig.eigenvectors().transpose() * (region.center - mu);
    return (z.array().square() / ev.array()).sum();
}

inline bool wald_covers(const WaldRegion& region, const Vector& mu) {
    return wald_statistic(region, mu) <= region.chi2_quantile;
}

}  // namespace mcgc
