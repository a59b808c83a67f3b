#include "oslr/linalg.hpp"

#include "oslr/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace oslr {

Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& m, std::optional<double> tol)
{
    if (m.rows() != m.cols()) throw DomainError("pseudo_inverse expects a square matrix");
    const Eigen::Index q = m.rows();
    if (q == 0) return m;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw DomainError("pseudo_inverse expects a symmetric matrix");

    const double cutoff = tol.value_or(1e-12 * static_cast<double>(q));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv[0] : 0.0;

    Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (largest > 0.0 && sv[i] > cutoff * largest) inv_sv[i] = 1.0 / sv[i];
    }
    Eigen::MatrixXd result = svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
    // symmetric input has a symmetric pseudoinverse; remove rounding asymmetry
    return 0.5 * (result + result.transpose());
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
    Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace oslr
