#pragma once

#include <Eigen/Core>

#include <optional>

namespace oslr {

/**
 * Moore-Penrose inverse of a symmetric matrix via singular value decomposition.
 *
 * Singular values below `tol * largest singular value` are treated as zero.
 * The default cutoff is 1e-12 * rows. Throws DomainError when `m` is not
 * square or not symmetric within 1e-10.
 */
Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, std::optional<double> tol = std::nullopt);

/// Symmetric positive semidefinite square root (negative eigenvalues clipped).
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

}  // namespace oslr
