#include "rmtt/linalg.hpp"

#include <cmath>
#include <numbers>

namespace rmtt {

double min_eigenvalue(const MatX& m) {
    Eigen::SelfAdjointEigenSolver<MatX> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double log_gaussian_density(const VecX& x, const VecX& mean, const MatX& cov) {
    Eigen::LLT<MatX> llt(symmetrize(cov));
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("gaussian covariance");
    const VecX diff = x - mean;
    const VecX w = llt.matrixL().solve(diff);
    const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const double d = static_cast<double>(x.size());
    return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + w.squaredNorm());
}

}  // namespace rmtt
