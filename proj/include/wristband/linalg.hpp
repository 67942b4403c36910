#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "errors.hpp"
#include "point_batch.hpp"

namespace wristband {

/// Eigen-decomposition of a symmetric matrix; eigenvalues sorted descending,
/// eigenvectors in the matching columns.
struct SymmetricEigen {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

inline SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
    require(m.rows() == m.cols(), "symmetric_eigen: matrix must be square");
    require(m.allFinite(), "symmetric_eigen: non-finite entry");
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric_eigen: solver failed");
    // Eigen returns ascending order
    SymmetricEigen out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

/// Column means and biased (1/N) covariance of a batch.
inline void batch_moments(const PointBatch& batch, Eigen::VectorXd& mean, Eigen::MatrixXd& cov) {
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
        batch.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    mean = x.colwise().mean().transpose();
    const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
    cov = (centered.transpose() * centered) / static_cast<double>(n);
}

}  // namespace wristband
