#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mcgc/chains.hpp"
#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"
#include "mcgc/models.hpp"
#include "mcgc/oracles.hpp"
#include "mcgc/rng.hpp"

namespace mcgc {

namespace detail {

inline void check_starts(const std::vector<Vector>& starts, std::size_t m, std::size_t p) {
    if (m < 1) throw InputError("need at least one chain");
    if (starts.size() != m) throw InputError("need exactly one starting point per chain");
    for (const auto& s : starts) {
        if (static_cast<std::size_t>(s.size()) != p) throw ShapeError("starting point has the wrong dimension");
        if (!s.allFinite()) throw InputError("starting points must be finite");
    }
}

/// Lower factor L with L L^T = Omega; falls back to a symmetric square root
/// when Omega is only semi-definite.
inline Matrix noise_factor(const Matrix& omega) {
    Eigen::LLT<Matrix> llt(omega);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(omega);
    const Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace detail

/**
 * m chains of the VAR(1) recursion, chain s started at starts[s].
 *
 * The start is X_0 and is not recorded; the output holds X_1..X_n. Chain s
 * draws its innovations from the counter stream (seed, s).
 */
inline ChainSet simulate_var1(const VarProcess& proc, std::size_t m, std::size_t n, const std::vector<Vector>& starts,
                              std::uint64_t seed) {
    proc.validate();
    const auto p = proc.p();
    detail::check_starts(starts, m, p);
    const Matrix factor = detail::noise_factor(proc.omega);
    const auto P = static_cast<Eigen::Index>(p);
    RowMatrix data(static_cast<Eigen::Index>(m * n), P);
    Vector x(P), z(P);
    for (std::size_t s = 0; s < m; ++s) {
        CounterRng rng(seed, s);
        x = starts[s];
        for (std::size_t t = 0; t < n; ++t) {
            for (Eigen::Index i = 0; i < P; ++i) z(i) = rng.normal();
            x = proc.phi * x + factor * z;
            data.row(static_cast<Eigen::Index>(s * n + t)) = x.transpose();
        }
    }
    return ChainSet(m, n, p, std::move(data));
}

/**
 * Dispersed starts for a VAR(1): m points evenly spaced between -3 and +3
 * stationary standard deviations along the leading principal axis of Psi
 * (the origin when m = 1).
 */
inline std::vector<Vector> var_dispersed_starts(const VarProcess& proc, std::size_t m) {
    const Matrix psi = var_stationary_cov(proc.phi, proc.omega);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(psi);
    const Eigen::Index top = eig.eigenvalues().size() - 1;
    const Vector axis = eig.eigenvectors().col(top) * std::sqrt(eig.eigenvalues()(top));
    std::vector<Vector> out;
    for (std::size_t s = 0; s < m; ++s) {
        const double z = m == 1 ? 0.0 : -3.0 + 6.0 * static_cast<double>(s) / static_cast<double>(m - 1);
        out.push_back(z * axis);
    }
    return out;
}

/// +-3 stationary marginal standard deviations along each coordinate axis,
/// then the origin, cycled to fill m chains.
inline std::vector<Vector> var_axis_starts(const VarProcess& proc, std::size_t m) {
    const Matrix psi = var_stationary_cov(proc.phi, proc.omega);
    const auto p = static_cast<Eigen::Index>(proc.p());
    std::vector<Vector> presets;
    for (Eigen::Index i = 0; i < p; ++i)
        for (double sign : {1.0, -1.0}) {
            Vector v = Vector::Zero(p);
            v(i) = sign * 3.0 * std::sqrt(psi(i, i));
            presets.push_back(v);
        }
    presets.push_back(Vector::Zero(p));
    std::vector<Vector> out;
    for (std::size_t s = 0; s < m; ++s) out.push_back(presets[s % presets.size()]);
    return out;
}

/// Random-walk Metropolis with N(x, sd^2) proposals on the mixture target.
inline ChainSet rwm_mixture(const MixtureTarget& target, std::size_t m, std::size_t n, const std::vector<double>& starts,
                            std::uint64_t seed) {
    target.validate();
    if (starts.size() != m) throw InputError("need exactly one starting point per chain");
    RowMatrix data(static_cast<Eigen::Index>(m * n), 1);
    for (std::size_t s = 0; s < m; ++s) {
        if (!std::isfinite(starts[s])) throw InputError("starting points must be finite");
        CounterRng rng(seed, s);
        double x = starts[s];
        double log_fx = target.log_density(x);
        for (std::size_t t = 0; t < n; ++t) {
            const double y = x + target.proposal_sd * rng.normal();
            const double log_fy = target.log_density(y);
            if (std::log(rng.uniform()) < log_fy - log_fx) {
                x = y;
                log_fx = log_fy;
            }
            data(static_cast<Eigen::Index>(s * n + t), 0) = x;
        }
    }
    return ChainSet(m, n, 1, std::move(data));
}

/// Deterministic-scan Gibbs sampler: x | y, then y | x; one row per sweep.
inline ChainSet gibbs_boomerang(const BoomerangTarget& target, std::size_t m, std::size_t n, const std::vector<Vector>& starts,
                                std::uint64_t seed) {
    target.validate();
    detail::check_starts(starts, m, 2);
    RowMatrix data(static_cast<Eigen::Index>(m * n), 2);
    for (std::size_t s = 0; s < m; ++s) {
        CounterRng rng(seed, s);
        double x = starts[s](0), y = starts[s](1);
        for (std::size_t t = 0; t < n; ++t) {
            double precision = target.A * y * y + 1.0;
            x = (target.B * y + target.C) / precision + rng.normal() / std::sqrt(precision);
            precision = target.A * x * x + 1.0;
            y = (target.B * x + target.C) / precision + rng.normal() / std::sqrt(precision);
            const auto row = static_cast<Eigen::Index>(s * n + t);
            data(row, 0) = x;
            data(row, 1) = y;
        }
    }
    return ChainSet(m, n, 2, std::move(data));
}

/// Starts spread evenly along the segment from (0, 8) to (8, 0), which
/// passes through both modes of the well-separated setting.
inline std::vector<Vector> boomerang_starts(std::size_t m) {
    std::vector<Vector> out;
    for (std::size_t s = 0; s < m; ++s) {
        const double frac = m == 1 ? 0.5 : static_cast<double>(s) / static_cast<double>(m - 1);
        out.push_back(Eigen::Vector2d(8.0 * frac, 8.0 * (1.0 - frac)));
    }
    return out;
}

/// Mixture starts alternate between the two component means.
inline std::vector<double> mixture_starts(const MixtureTarget& target, std::size_t m) {
    std::vector<double> out;
    for (std::size_t s = 0; s < m; ++s) out.push_back(target.means[s % 2]);
    return out;
}

}  // namespace mcgc
