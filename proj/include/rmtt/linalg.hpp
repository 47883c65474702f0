#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace rmtt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

/// Raised when a matrix that must be symmetric positive definite is not.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what)
        : std::runtime_error("matrix is not positive definite: " + what) {}
};

class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

template <typename Derived>
typename Derived::PlainObject symmetrize(const Eigen::MatrixBase<Derived>& m) {
    return (0.5 * (m + m.transpose())).eval();
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m, double tol = 1e-10) {
    return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const MatX& m);

template <typename Derived>
bool is_positive_definite(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    Eigen::LLT<typename Derived::PlainObject> llt(symmetrize(m));
    return llt.info() == Eigen::Success;
}

/// Inverse through a Cholesky factorisation; the result is symmetrised.
template <typename Derived>
typename Derived::PlainObject spd_inverse(const Eigen::MatrixBase<Derived>& m,
                                          const char* what = "spd_inverse") {
    using Plain = typename Derived::PlainObject;
    Eigen::LLT<Plain> llt(symmetrize(m));
    if (llt.info() != Eigen::Success || !m.allFinite()) throw NotPositiveDefinite(what);
    Plain inv = llt.solve(Plain::Identity(m.rows(), m.cols()));
    return symmetrize(inv);
}

template <typename Derived>
double spd_log_det(const Eigen::MatrixBase<Derived>& m, const char* what = "spd_log_det") {
    using Plain = typename Derived::PlainObject;
    Eigen::LLT<Plain> llt(symmetrize(m));
    if (llt.info() != Eigen::Success || !m.allFinite()) throw NotPositiveDefinite(what);
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

/// Log of the multivariate normal density N(x; mean, cov).
double log_gaussian_density(const VecX& x, const VecX& mean, const MatX& cov);

}  // namespace rmtt
