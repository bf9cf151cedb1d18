#pragma once

#include <Eigen/Dense>

namespace mcgc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Row-major storage used for chain data: one row per iteration.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

/// ||a - b||_F / ||b||_F, falling back to the absolute norm when b is zero.
inline double relative_frobenius(const Matrix& a, const Matrix& b) {
    const double denom = b.norm();
    const double diff = (a - b).norm();
    return denom > 0.0 ? diff / denom : diff;
}

}  // namespace mcgc
