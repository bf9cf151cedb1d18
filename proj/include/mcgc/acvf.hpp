#pragma once

#include <cmath>
#include <cstddef>
#include <ostream>
#include <iomanip>
#include <optional>
#include <string>
#include <vector>

#include "mcgc/chains.hpp"
#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"

namespace mcgc {

/// Which mean the deviations are taken about: the chain's own mean or the
/// mean over all chains.
enum class Centering { local, global };

inline const char* to_string(Centering c) { return c == Centering::local ? "local" : "global"; }

enum class Scope { per_chain, averaged };

/// Lag-covariance matrices for lags 0..K. Negative lags are the transposes.
struct AcvfSequence {
    std::vector<Matrix> matrices;
    Centering centering = Centering::local;
    Scope scope = Scope::per_chain;
    std::optional<std::size_t> chain;

    std::size_t max_lag() const { return matrices.size() - 1; }

    Matrix at(long k) const {
        const auto idx = static_cast<std::size_t>(k < 0 ? -k : k);
        if (idx >= matrices.size()) throw LagTooLarge("lag " + std::to_string(k) + " not stored");
        return k < 0 ? Matrix(matrices[idx].transpose()) : matrices[idx];
    }
};

namespace detail {

inline Vector center_for(const ChainSet& c, std::size_t s, Centering centering) {
    return centering == Centering::local ? chain_mean(c, s) : global_mean(c);
}

inline void check_lag(const ChainSet& c, std::size_t k) {
    if (k >= c.n())
        throw LagTooLarge("lag " + std::to_string(k) + " must be below the chain length " + std::to_string(c.n()));
}

/// Deviations of chain s about `center`, n x p.
inline RowMatrix deviations(const ChainSet& c, std::size_t s, const Vector& center) {
    return c.chain(s).rowwise() - center.transpose();
}

/// (1/n) sum_{t < n-k} d_t d_{t+k}^T, accumulated left to right per entry.
inline Matrix lag_product(const RowMatrix& dev, std::size_t k) {
    const auto n = static_cast<std::size_t>(dev.rows());
    const auto p = dev.cols();
    Matrix acc = Matrix::Zero(p, p);
    for (std::size_t t = 0; t + k < n; ++t) {
        const auto a = static_cast<Eigen::Index>(t);
        const auto b = static_cast<Eigen::Index>(t + k);
        for (Eigen::Index i = 0; i < p; ++i) {
            const double x = dev(a, i);
            for (Eigen::Index j = 0; j < p; ++j) acc(i, j) += x * dev(b, j);
        }
    }
    return acc / static_cast<double>(n);
}

/// Scalar lag covariances 0..K of one component; same arithmetic as lag_product.
inline std::vector<double> scalar_lag_products(const RowMatrix& dev, Eigen::Index i, std::size_t max_lag) {
    const auto n = static_cast<std::size_t>(dev.rows());
    std::vector<double> out(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t)
            acc += dev(static_cast<Eigen::Index>(t), i) * dev(static_cast<Eigen::Index>(t + k), i);
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

}  // namespace detail

/**
 * Lag-k autocovariance of chain s, divisor n.
 *
 * Local centering uses the chain mean, global centering the mean over all
 * chains. With m = 1 both are bitwise identical.
 */
inline Matrix acvf(const ChainSet& c, std::size_t s, std::size_t k, Centering centering) {
    c.check_chain(s);
    detail::check_lag(c, k);
    return detail::lag_product(detail::deviations(c, s, detail::center_for(c, s, centering)), k);
}

/// Lags 0..K of chain s in one pass over the centered data.
inline AcvfSequence acvf_sequence(const ChainSet& c, std::size_t s, std::size_t max_lag, Centering centering) {
    c.check_chain(s);
    detail::check_lag(c, max_lag);
    const RowMatrix dev = detail::deviations(c, s, detail::center_for(c, s, centering));
    AcvfSequence out{{}, centering, Scope::per_chain, s};
    out.matrices.reserve(max_lag + 1);
    for (std::size_t k = 0; k <= max_lag; ++k) out.matrices.push_back(detail::lag_product(dev, k));
    return out;
}

/// Chain average of the globally-centered lag-k autocovariances.
inline Matrix averaged_global_acvf(const ChainSet& c, std::size_t k) {
    detail::check_lag(c, k);
    const Vector center = global_mean(c);
    Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(c.p()), static_cast<Eigen::Index>(c.p()));
    for (std::size_t s = 0; s < c.m(); ++s) sum += detail::lag_product(detail::deviations(c, s, center), k);
    return sum / static_cast<double>(c.m());
}

inline AcvfSequence averaged_global_acvf_sequence(const ChainSet& c, std::size_t max_lag) {
    detail::check_lag(c, max_lag);
    const Vector center = global_mean(c);
    const auto p = static_cast<Eigen::Index>(c.p());
    AcvfSequence out{std::vector<Matrix>(max_lag + 1, Matrix::Zero(p, p)), Centering::global, Scope::averaged, std::nullopt};
    for (std::size_t s = 0; s < c.m(); ++s) {
        const RowMatrix dev = detail::deviations(c, s, center);
        for (std::size_t k = 0; k <= max_lag; ++k) out.matrices[k] += detail::lag_product(dev, k);
    }
    for (auto& mtx : out.matrices) mtx /= static_cast<double>(c.m());
    return out;
}

/// Autocorrelations rho(0..K) of component i of chain s.
inline Vector acf(const ChainSet& c, std::size_t s, std::size_t i, std::size_t max_lag, Centering centering) {
    c.check_chain(s);
    detail::check_lag(c, max_lag);
    if (i >= c.p()) throw IndexError("component index " + std::to_string(i) + " out of range");
    const RowMatrix dev = detail::deviations(c, s, detail::center_for(c, s, centering));
    const auto gamma = detail::scalar_lag_products(dev, static_cast<Eigen::Index>(i), max_lag);
    if (!(gamma[0] > 0.0))
        throw DegenerateVariance("component " + std::to_string(i) + " of chain " + std::to_string(s) +
                                 " has zero lag-0 variance under " + to_string(centering) + " centering");
    Vector out(static_cast<Eigen::Index>(max_lag + 1));
    for (std::size_t k = 0; k <= max_lag; ++k) out(static_cast<Eigen::Index>(k)) = gamma[k] / gamma[0];
    return out;
}

/// Mean over chains of the per-chain G-ACF vectors (mean of ratios).
inline Vector averaged_global_acf(const ChainSet& c, std::size_t i, std::size_t max_lag) {
    Vector sum = Vector::Zero(static_cast<Eigen::Index>(max_lag + 1));
    for (std::size_t s = 0; s < c.m(); ++s) sum += acf(c, s, i, max_lag, Centering::global);
    return sum / static_cast<double>(c.m());
}

/// min(n-1, ceil(10 log10 n)).
inline std::size_t default_max_lag(std::size_t n) {
    const auto rule = static_cast<std::size_t>(std::ceil(10.0 * std::log10(static_cast<double>(n))));
    return std::min(n - 1, rule);
}

/// Ingredients of the leading-order expectation of a globally-centered
/// autocovariance estimate.
struct BiasTarget {
    Matrix gamma_k;  // true Gamma(k)
    Matrix sigma;    // long-run covariance
    Matrix phi;      // sum_k |k| Gamma(k)
    std::size_t m = 1;
    std::size_t n = 2;
    long k = 0;
};

/// (1 - |k|/n) (Gamma(k) - Sigma/(mn) - Phi/(mn^2)).
inline Matrix theorem1_bias_target(const BiasTarget& b) {
    const double n = static_cast<double>(b.n);
    const double m = static_cast<double>(b.m);
    const double factor = 1.0 - std::abs(static_cast<double>(b.k)) / n;
    return factor * (b.gamma_k - b.sigma / (m * n) - b.phi / (m * n * n));
}

struct AcfRow {
    std::size_t lag = 0;
    std::size_t chain = 0;      // 1-based; 0 marks chain-averaged rows
    std::size_t component = 1;  // 1-based
    std::string centering;      // local, global or oracle
    double value = 0.0;
};

inline void write_acf_csv(const std::vector<AcfRow>& rows, std::ostream& out) {
    out << "lag,chain,component,centering,value\n";
    out << std::setprecision(17);
    for (const auto& r : rows)
        out << r.lag << ',' << r.chain << ',' << r.component << ',' << r.centering << ',' << r.value << '\n';
}

}  // namespace mcgc
