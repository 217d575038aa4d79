#pragma once

#include "rlasso/model.hpp"
#include "rlasso/solver.hpp"

#include <vector>

namespace rlasso {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

/// Normal-theory inference for beta_hat with variance sigma2_hat * inv(Sigma_hat) / n.
struct InferenceReport {
  double level = 0.95;
  double critical_value = 0.0;  ///< standard-normal (1 - (1 - level)/2) quantile
  double sigma2_hat = 0.0;
  Matrix sigma_matrix_hat;      ///< x^T x / n
  Matrix sigma_matrix_inverse;
  Matrix beta_cov;
  Vector beta_hat;
  Vector std_errors;
  std::vector<Interval> intervals;
  Vector z_stats;               ///< beta_hat_j / se_j, null beta_j = 0
};

/// Standard-normal quantile function.
double normal_quantile(double p);

/// (1/n) sum_i (y_i - x_i^T beta_hat - alpha_hat_i)^2, no degrees-of-freedom
/// correction.
double sigma2_hat(const RegressionData& data, const FitResult& fit);

/// Throws kInvalidArgument for a level outside (0, 1) and kRankDeficient when
/// Sigma_hat is not numerically positive definite.
InferenceReport confidence_intervals(const RegressionData& data, const FitResult& fit,
                                     double level = 0.95);

}  // namespace rlasso
