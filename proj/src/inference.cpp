#include "rlasso/inference.hpp"

#include "rlasso/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>

namespace rlasso {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kDomainError, "normal quantile needs p in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double sigma2_hat(const RegressionData& data, const FitResult& fit) {
  if (fit.beta_hat.size() != data.k() || fit.alpha_hat.size() != data.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "fit does not belong to this data");
  }
  const Vector resid = data.y() - data.x() * fit.beta_hat - fit.alpha_hat;
  return resid.squaredNorm() / static_cast<double>(data.n());
}

InferenceReport confidence_intervals(const RegressionData& data, const FitResult& fit,
                                     double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence level must lie in (0, 1)");
  }
  const Index k = data.k();
  const double n = static_cast<double>(data.n());

  InferenceReport rep;
  rep.level = level;
  rep.critical_value = normal_quantile(1.0 - (1.0 - level) / 2.0);
  rep.sigma2_hat = sigma2_hat(data, fit);
  rep.sigma_matrix_hat = data.x().transpose() * data.x() / n;

  Eigen::LLT<Matrix> llt(rep.sigma_matrix_hat);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kRankDeficient, "Sigma_hat is not positive definite");
  }
  rep.sigma_matrix_inverse = llt.solve(Matrix::Identity(k, k));
  const Matrix check = rep.sigma_matrix_hat * rep.sigma_matrix_inverse - Matrix::Identity(k, k);
  if (!(check.cwiseAbs().maxCoeff() < 1e-8)) {
    throw Error(ErrorCode::kRankDeficient, "Sigma_hat is numerically singular");
  }

  rep.beta_cov = rep.sigma2_hat / n * rep.sigma_matrix_inverse;
  rep.beta_cov = 0.5 * (rep.beta_cov + rep.beta_cov.transpose()).eval();
  rep.beta_hat = fit.beta_hat;
  rep.std_errors = rep.beta_cov.diagonal().cwiseSqrt();
  rep.z_stats = Vector(k);
  rep.intervals.reserve(static_cast<std::size_t>(k));
  for (Index j = 0; j < k; ++j) {
    const double se = rep.std_errors(j);
    const double half = rep.critical_value * se;
    rep.intervals.push_back({fit.beta_hat(j) - half, fit.beta_hat(j) + half});
    rep.z_stats(j) = se > 0.0 ? fit.beta_hat(j) / se
                              : std::copysign(std::numeric_limits<double>::infinity(),
                                              fit.beta_hat(j));
  }
  return rep;
}

}  // namespace rlasso
