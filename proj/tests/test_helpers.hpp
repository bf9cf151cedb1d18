#pragma once

#include <cstddef>
#include <random>

#include "mcgc/chains.hpp"

namespace testing_support {

/// m chains of n Gaussian draws in p components, chain s shifted by s * shift.
inline mcgc::ChainSet random_chains(std::mt19937_64& gen, std::size_t m, std::size_t n, std::size_t p, double shift = 0.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    mcgc::RowMatrix d(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(p));
    for (std::size_t s = 0; s < m; ++s)
        for (std::size_t t = 0; t < n; ++t)
            for (std::size_t i = 0; i < p; ++i)
                d(static_cast<Eigen::Index>(s * n + t), static_cast<Eigen::Index>(i)) = z(gen) + shift * static_cast<double>(s);
    return mcgc::ChainSet(m, n, p, std::move(d));
}

/// As random_chains, but each chain is an AR(1) path with coefficient phi.
inline mcgc::ChainSet ar_chains(std::mt19937_64& gen, std::size_t m, std::size_t n, std::size_t p, double phi, double shift = 0.0) {
    std::normal_distribution<double> z(0.0, 1.0);
    mcgc::RowMatrix d(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(p));
    for (std::size_t s = 0; s < m; ++s)
        for (std::size_t i = 0; i < p; ++i) {
            double x = z(gen);
            for (std::size_t t = 0; t < n; ++t) {
                x = phi * x + z(gen);
                d(static_cast<Eigen::Index>(s * n + t), static_cast<Eigen::Index>(i)) = x + shift * static_cast<double>(s);
            }
        }
    return mcgc::ChainSet(m, n, p, std::move(d));
}

}  // namespace testing_support
