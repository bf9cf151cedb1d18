#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mcgc/acvf.hpp"
#include "mcgc/chains.hpp"
#include "mcgc/errors.hpp"
#include "mcgc/fft.hpp"
#include "mcgc/linalg.hpp"
#include "mcgc/windows.hpp"

namespace mcgc {

enum class Estimator { sv_chain, asv, gsv };
enum class Path { naive, fast };

inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::sv_chain: return "sv";
        case Estimator::asv: return "asv";
        case Estimator::gsv: return "gsv";
    }
    return "?";
}
inline const char* to_string(Path p) { return p == Path::naive ? "naive" : "fast"; }

inline Estimator estimator_by_name(const std::string& s) {
    if (s == "asv") return Estimator::asv;
    if (s == "gsv") return Estimator::gsv;
    if (s == "sv") return Estimator::sv_chain;
    throw InputError("unknown estimator '" + s + "'");
}
inline Path path_by_name(const std::string& s) {
    if (s == "naive") return Path::naive;
    if (s == "fast") return Path::fast;
    throw InputError("unknown path '" + s + "'");
}

/// Below this length the direct double sum is cheaper than two FFTs.
inline constexpr std::size_t fast_path_min_length = 64;

inline Path select_path(std::size_t n) { return n < fast_path_min_length ? Path::naive : Path::fast; }

/// A long-run covariance estimate, symmetrized, with its provenance.
struct SvEstimate {
    Matrix matrix;
    Estimator estimator = Estimator::gsv;
    Path path = Path::naive;
    std::size_t b_n = 1;
    std::string window;

    double min_eigenvalue() const {
        return Eigen::SelfAdjointEigenSolver<Matrix>(matrix, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    }
    bool positive_definite() const { return min_eigenvalue() > 0.0; }
};

/**
 * Symmetric circulant extension of the n x n Toeplitz lag-weight matrix.
 *
 * wstar = (1, w_1, ..., w_{n-1}, 0, w_{n-1}, ..., w_1) has length 2n and the
 * leading n x n block of the circulant it generates is the Toeplitz matrix
 * T(w) with first column (1, w_1, ..., w_{n-1}). The circulant's
 * eigenvalues are the DFT of wstar.
 */
struct CirculantEmbedding {
    std::size_t n = 0;
    std::vector<double> wstar;
    std::vector<std::complex<double>> eigenvalues;
};

inline CirculantEmbedding build_embedding(const LagWindow& w, const Bandwidth& b, std::size_t n) {
    if (n < 1) throw ShapeError("embedding length must be positive");
    if (b.b_n < 1 || b.b_n > n) throw BandwidthError("bandwidth must lie in [1, n]");
    CirculantEmbedding emb;
    emb.n = n;
    emb.wstar.assign(2 * n, 0.0);
    for (std::size_t k = 0; k < n && k < b.b_n; ++k) {
        const double wk = w(static_cast<double>(k) / static_cast<double>(b.b_n));
        emb.wstar[k] = wk;
        if (k > 0) emb.wstar[2 * n - k] = wk;
    }
    emb.eigenvalues = fft::dft(emb.wstar);
    return emb;
}

/**
 * (1/n) A^T T(w) A via the circulant embedding, without symmetrization.
 *
 * Each column of A is zero-padded to length 2n, transformed, scaled by the
 * circulant eigenvalues and transformed back; the first n rows of the
 * result are T(w) A. The caller centers the columns of A (about the chain
 * mean or the global mean).
 */
template <class Derived>
Matrix fast_sv(const Eigen::MatrixBase<Derived>& centered, const CirculantEmbedding& emb) {
    const auto n = static_cast<std::size_t>(centered.rows());
    const auto p = static_cast<std::size_t>(centered.cols());
    if (n != emb.n || emb.wstar.size() != 2 * n || emb.eigenvalues.size() != 2 * n)
        throw ShapeError("input has " + std::to_string(n) + " rows but the embedding was built for n=" + std::to_string(emb.n));
    if (p == 0) throw ShapeError("input has no columns");

    const std::size_t N = 2 * n;
    fft::RealColumns plan(N, p);
    for (std::size_t j = 0; j < p; ++j) {
        double* col = plan.column(j);
        for (std::size_t t = 0; t < n; ++t) col[t] = centered(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
        std::fill(col + n, col + N, 0.0);
    }
    plan.forward();
    // The circulant is real and symmetric, so its eigenvalues are real.
    for (std::size_t j = 0; j < p; ++j) {
        auto* spec = plan.spectrum(j);
        for (std::size_t i = 0; i < plan.bins(); ++i) spec[i] *= emb.eigenvalues[i].real();
    }
    plan.backward();

    // First n rows of each padded column: A itself on the input side, and
    // N T(w) A on the output side.
    using Columns = Eigen::Map<const Matrix, Eigen::Unaligned, Eigen::OuterStride<>>;
    const Columns a(plan.column(0), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p), Eigen::OuterStride<>(static_cast<Eigen::Index>(N)));
    const Columns ta(plan.result(0), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p), Eigen::OuterStride<>(static_cast<Eigen::Index>(N)));
    Matrix out = a.transpose() * ta;
    out /= static_cast<double>(N) * static_cast<double>(n);
    return out;
}

namespace detail {

/// sum_{|k| < b_n} w(k/b_n) Upsilon(k) by the direct double sum.
inline Matrix naive_weighted_sum(const RowMatrix& dev, const LagWindow& w, const Bandwidth& b) {
    const auto n = static_cast<std::size_t>(dev.rows());
    const auto weights = lag_weights(w, b, std::min(b.b_n, n));
    Matrix out = lag_product(dev, 0);
    for (std::size_t k = 1; k < weights.size(); ++k) {
        if (weights[k] == 0.0) continue;
        const Matrix g = lag_product(dev, k);
        out += weights[k] * (g + g.transpose());
    }
    return out;
}

inline SvEstimate chain_estimate(const ChainSet& c, std::size_t s, const Vector& center, const LagWindow& w, const Bandwidth& b,
                                 Path path, const CirculantEmbedding* emb) {
    Matrix raw = path == Path::naive ? naive_weighted_sum(deviations(c, s, center), w, b)
                                     : fast_sv(c.chain(s).rowwise() - center.transpose(), *emb);
    return SvEstimate{symmetrize(raw), Estimator::sv_chain, path, b.b_n, w.name};
}

}  // namespace detail

/// Single-chain SV estimate by the direct double sum.
inline SvEstimate sv_naive(const ChainSet& c, std::size_t s, const LagWindow& w, const Bandwidth& b, Centering centering) {
    c.check_chain(s);
    check_bandwidth(b, c.n());
    return detail::chain_estimate(c, s, detail::center_for(c, s, centering), w, b, Path::naive, nullptr);
}

/// Single-chain SV estimate through the circulant embedding.
inline SvEstimate sv_fast(const ChainSet& c, std::size_t s, const LagWindow& w, const Bandwidth& b, Centering centering) {
    c.check_chain(s);
    check_bandwidth(b, c.n());
    const auto emb = build_embedding(w, b, c.n());
    return detail::chain_estimate(c, s, detail::center_for(c, s, centering), w, b, Path::fast, &emb);
}

/**
 * Chain average of per-chain SV estimates. With local centering this is the
 * A-SV estimator; with global centering it equals the weighted sum of the
 * chain-averaged G-ACvFs (G-SV), by linearity.
 */
inline SvEstimate averaged_sv(const ChainSet& c, const LagWindow& w, const Bandwidth& b, Centering centering, Path path) {
    check_bandwidth(b, c.n());
    CirculantEmbedding emb;
    if (path == Path::fast) emb = build_embedding(w, b, c.n());
    const Vector global = global_mean(c);
    const auto p = static_cast<Eigen::Index>(c.p());
    Matrix sum = Matrix::Zero(p, p);
    for (std::size_t s = 0; s < c.m(); ++s) {
        const Vector center = centering == Centering::local ? chain_mean(c, s) : global;
        sum += detail::chain_estimate(c, s, center, w, b, path, &emb).matrix;
    }
    return SvEstimate{symmetrize(sum / static_cast<double>(c.m())),
                      centering == Centering::local ? Estimator::asv : Estimator::gsv, path, b.b_n, w.name};
}

inline SvEstimate asv(const ChainSet& c, const LagWindow& w, const Bandwidth& b, Path path = Path::naive) {
    return averaged_sv(c, w, b, Centering::local, path);
}

inline SvEstimate gsv(const ChainSet& c, const LagWindow& w, const Bandwidth& b, Path path = Path::naive) {
    return averaged_sv(c, w, b, Centering::global, path);
}

inline SvEstimate gsv_fast(const ChainSet& c, const LagWindow& w, const Bandwidth& b) {
    return averaged_sv(c, w, b, Centering::global, Path::fast);
}

inline SvEstimate asv_fast(const ChainSet& c, const LagWindow& w, const Bandwidth& b) {
    return averaged_sv(c, w, b, Centering::local, Path::fast);
}

inline SvEstimate estimate_sigma(const ChainSet& c, Estimator e, const LagWindow& w, const Bandwidth& b, Path path) {
    switch (e) {
        case Estimator::asv: return asv(c, w, b, path);
        case Estimator::gsv: return gsv(c, w, b, path);
        case Estimator::sv_chain:
            return path == Path::naive ? sv_naive(c, 0, w, b, Centering::local) : sv_fast(c, 0, w, b, Centering::local);
    }
    throw InputError("unknown estimator");
}

}  // namespace mcgc
