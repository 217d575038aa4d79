#pragma once

#include "rlasso/model.hpp"

#include <optional>
#include <vector>

namespace rlasso {

enum class InitPolicy {
  kZeroAlpha,         ///< alpha^(0) = 0
  kOlsResidualAlpha,  ///< alpha^(0) = soft-thresholded OLS residuals
};

struct FitConfig {
  double lambda = 0.0;
  int max_iters = 100;
  double rel_tol = 1e-10;
  /// Lower guard on sigma inside the alpha-threshold. Unset means
  /// 1e-12 * ||y||_2 for the data being fitted.
  std::optional<double> abs_sigma_floor;
  InitPolicy init_policy = InitPolicy::kZeroAlpha;

  /// Throws Error{kInvalidArgument} when a field is out of range.
  void validate() const;
};

enum class FitWarning {
  /// The residual norm fell below the sigma floor; the objective is not
  /// differentiable there and the iteration stops.
  kDegenerateResidual,
};

const char* to_string(FitWarning warning);

struct FitResult {
  Vector beta_hat;
  Vector alpha_hat;
  /// ||y - x beta_hat - alpha_hat||_2 / sqrt(n)
  double sigma_hat = 0.0;
  /// ||y - x beta_hat - alpha_hat||_2, the sigma of the iteration itself
  double residual_norm = 0.0;
  double lambda = 0.0;
  /// Concentrated objective after initialisation and after every iteration.
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations_used = 0;
  std::vector<Index> outlier_indices;
  std::vector<FitWarning> warnings;

  bool has_warning(FitWarning w) const;
};

/// (1/sqrt(n)) ||y - x beta - alpha||_2 + (lambda/n) ||alpha||_1
double objective(const RegressionData& data, const Vector& beta, const Vector& alpha,
                 double lambda);

/// Elementwise soft thresholding; |r_i| <= threshold maps to exactly zero.
Vector soft_threshold_update(const Vector& residual, double threshold);

/// Block-coordinate minimisation over (beta, alpha, sigma) of
///
///   sigma/2 + ||y - x beta - alpha||^2 / (2 sigma) + (lambda/sqrt(n)) ||alpha||_1,
///
/// whose profile in sigma is sqrt(n) times the concentrated objective. Each
/// sweep is an OLS beta-step on y - alpha, a soft-threshold alpha-step at
/// lambda * sigma / sqrt(n), and sigma = ||y - x beta - alpha||_2.
///
/// Stops after max_iters sweeps or when the relative change of the
/// concentrated objective drops below rel_tol. Throws kRankDeficient for a
/// collinear design and kNonFinite if an iterate blows up.
FitResult fit(const RegressionData& data, const FitConfig& config);

/// Same as fit() with a precomputed factorisation of data.x().
FitResult fit(const RegressionData& data, const LeastSquares& ls, const FitConfig& config);

}  // namespace rlasso
