#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Eigenvalues>

#include "mcgc/errors.hpp"
#include "mcgc/linalg.hpp"

namespace mcgc {

inline double spectral_radius(const Matrix& a) {
    return Eigen::EigenSolver<Matrix>(a, false).eigenvalues().cwiseAbs().maxCoeff();
}

/// X_t = Phi X_{t-1} + eps_t with eps_t ~ N(0, Omega).
struct VarProcess {
    Matrix phi;
    Matrix omega;

    std::size_t p() const { return static_cast<std::size_t>(phi.rows()); }

    /// Throws Unstable unless rho(Phi) < 1; Omega must be symmetric PSD.
    void validate() const {
        if (phi.rows() != phi.cols() || omega.rows() != omega.cols() || phi.rows() != omega.rows() || phi.rows() == 0)
            throw ShapeError("Phi and Omega must be square with matching dimension");
        if (!phi.allFinite() || !omega.allFinite()) throw InputError("VAR parameters must be finite");
        const double rho = spectral_radius(phi);
        if (!(rho < 1.0)) throw Unstable("spectral radius of Phi is " + std::to_string(rho) + " (must be < 1)");
        if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, omega.cwiseAbs().maxCoeff()))
            throw InputError("Omega must be symmetric");
        const double min_ev = Eigen::SelfAdjointEigenSolver<Matrix>(omega, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
        if (min_ev < -1e-12 * std::max(1.0, omega.norm())) throw InputError("Omega must be positive semi-definite");
    }
};

/// AR(1)-type correlation matrix, entries rho^|i-j|.
inline Matrix ar_correlation(std::size_t p, double rho) {
    Matrix out(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::pow(rho, std::abs(static_cast<double>(i) - static_cast<double>(j)));
    return out;
}

/**
 * The bivariate VAR(1) benchmark: Phi = Q diag(.999, .001) Q^T with Q the
 * rotation by pi/4, and Omega the AR correlation matrix with parameter .9.
 */
inline VarProcess benchmark_var_process() {
    const double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
    Matrix q(2, 2);
    q << c, -s, s, c;
    const Matrix lambda = Eigen::Vector2d(0.999, 0.001).asDiagonal();
    return VarProcess{q * lambda * q.transpose(), ar_correlation(2, 0.9)};
}

/// Scalar AR(1) as a 1 x 1 VAR.
inline VarProcess ar1_process(double phi, double innovation_variance) {
    return VarProcess{Matrix::Constant(1, 1, phi), Matrix::Constant(1, 1, innovation_variance)};
}

/// Two-component normal mixture 0.7 N(-5, 1) + 0.3 N(5, 0.5) (variances).
struct MixtureTarget {
    double weights[2] = {0.7, 0.3};
    double means[2] = {-5.0, 5.0};
    double variances[2] = {1.0, 0.5};
    double proposal_sd = 2.0;

    void validate() const {
        if (std::abs(weights[0] + weights[1] - 1.0) > 1e-12 || weights[0] < 0.0 || weights[1] < 0.0)
            throw InputError("mixture weights must be nonnegative and sum to 1");
        if (!(variances[0] > 0.0 && variances[1] > 0.0)) throw InputError("mixture variances must be positive");
        if (!(proposal_sd > 0.0)) throw InputError("proposal standard deviation must be positive");
    }

    double log_density(double x) const {
        double terms[2];
        for (int k = 0; k < 2; ++k) {
            const double z = x - means[k];
            terms[k] = std::log(weights[k]) - 0.5 * std::log(2.0 * M_PI * variances[k]) - 0.5 * z * z / variances[k];
        }
        const double hi = std::max(terms[0], terms[1]);
        return hi + std::log(std::exp(terms[0] - hi) + std::exp(terms[1] - hi));
    }

    double mean() const { return weights[0] * means[0] + weights[1] * means[1]; }

    /// P(X > 0).
    double mass_above_zero() const {
        double total = 0.0;
        for (int k = 0; k < 2; ++k) total += weights[k] * 0.5 * std::erfc(-means[k] / std::sqrt(2.0 * variances[k]));
        return total;
    }
};

/// Density proportional to exp(-(A x^2 y^2 + x^2 + y^2 - 2Bxy - 2Cx - 2Cy) / 2).
struct BoomerangTarget {
    double A = 1.0;
    double B = 3.0;
    double C = 8.0;

    void validate() const {
        if (!(A >= 0.0)) throw InputError("boomerang A must be nonnegative");
        if (A == 0.0 && !(std::abs(B) < 1.0)) throw InputError("boomerang density is not integrable for A = 0 and |B| >= 1");
    }

    double log_density(double x, double y) const {
        return -0.5 * (A * x * x * y * y + x * x + y * y - 2.0 * B * x * y - 2.0 * C * x - 2.0 * C * y);
    }

    static BoomerangTarget setting1() { return {1.0, 3.0, 8.0}; }
    static BoomerangTarget setting2() { return {1.0, 10.0, 7.0}; }
};

}  // namespace mcgc
