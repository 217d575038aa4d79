#include "rlasso/solver.hpp"

#include "rlasso/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rlasso {

void FitConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be finite and >= 0");
  }
  if (max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be >= 1");
  }
  if (!(rel_tol > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rel_tol must be > 0");
  }
  if (abs_sigma_floor && !(*abs_sigma_floor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "abs_sigma_floor must be > 0");
  }
}

const char* to_string(FitWarning warning) {
  switch (warning) {
    case FitWarning::kDegenerateResidual: return "DegenerateResidual";
  }
  return "Unknown";
}

bool FitResult::has_warning(FitWarning w) const {
  return std::find(warnings.begin(), warnings.end(), w) != warnings.end();
}

double objective(const RegressionData& data, const Vector& beta, const Vector& alpha,
                 double lambda) {
  if (beta.size() != data.k() || alpha.size() != data.n() || data.x().rows() != data.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "objective arguments do not conform");
  }
  const double n = static_cast<double>(data.n());
  const double fit_term = (data.y() - data.x() * beta - alpha).norm() / std::sqrt(n);
  return fit_term + lambda / n * alpha.lpNorm<1>();
}

Vector soft_threshold_update(const Vector& residual, double threshold) {
  Vector out(residual.size());
  for (Index i = 0; i < residual.size(); ++i) {
    const double r = residual(i);
    if (std::abs(r) <= threshold) {
      out(i) = 0.0;
    } else {
      out(i) = r > 0.0 ? r - threshold : r + threshold;
    }
  }
  return out;
}

namespace {

double concentrated(const Vector& resid, const Vector& alpha, double lambda, double n) {
  return resid.norm() / std::sqrt(n) + lambda / n * alpha.lpNorm<1>();
}

void ensure_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNonFinite, std::string(what) + " became non-finite");
  }
}

}  // namespace

FitResult fit(const RegressionData& data, const FitConfig& config) {
  return fit(data, LeastSquares(data.x()), config);
}

FitResult fit(const RegressionData& data, const LeastSquares& ls, const FitConfig& config) {
  config.validate();
  if (ls.rows() != data.n() || ls.cols() != data.k()) {
    throw Error(ErrorCode::kDimensionMismatch, "factorisation does not match the data");
  }
  const Matrix& x = data.x();
  const Vector& y = data.y();
  const double n = static_cast<double>(data.n());
  const double sqrt_n = std::sqrt(n);
  const double lambda = config.lambda;
  const double floor = config.abs_sigma_floor.value_or(
      std::max(1e-12 * y.norm(), std::numeric_limits<double>::min()));

  FitResult out;
  out.lambda = lambda;

  Vector beta = ls.solve(y);
  Vector fitted = x * beta;
  Vector alpha = Vector::Zero(data.n());
  if (config.init_policy == InitPolicy::kOlsResidualAlpha) {
    const Vector resid = y - fitted;
    alpha = soft_threshold_update(resid, lambda * std::max(resid.norm(), floor) / sqrt_n);
  }
  Vector resid = y - fitted - alpha;
  double sigma = resid.norm();
  ensure_finite(beta, "beta");
  out.objective_trace.push_back(concentrated(resid, alpha, lambda, n));

  int t = 0;
  bool converged = false;
  while (t < config.max_iters) {
    ++t;
    beta = ls.solve(y - alpha);
    fitted = x * beta;
    const Vector partial = y - fitted;

    const bool degenerate = sigma < floor;
    alpha = soft_threshold_update(partial, lambda * std::max(sigma, floor) / sqrt_n);
    resid = partial - alpha;
    sigma = resid.norm();

    ensure_finite(beta, "beta");
    ensure_finite(alpha, "alpha");

    const double prev = out.objective_trace.back();
    const double cur = concentrated(resid, alpha, lambda, n);
    out.objective_trace.push_back(cur);

    if (degenerate) {
      out.warnings.push_back(FitWarning::kDegenerateResidual);
      converged = true;
      break;
    }
    const double scale = std::max(std::abs(prev), std::numeric_limits<double>::min());
    if (std::abs(prev - cur) < config.rel_tol * scale) {
      converged = true;
      break;
    }
  }

  // Final beta-step so that beta_hat is exactly the OLS fit of y - alpha_hat.
  beta = ls.solve(y - alpha);
  resid = y - x * beta - alpha;
  sigma = resid.norm();
  ensure_finite(beta, "beta");
  out.objective_trace.back() = concentrated(resid, alpha, lambda, n);

  out.beta_hat = std::move(beta);
  out.alpha_hat = std::move(alpha);
  out.residual_norm = sigma;
  out.sigma_hat = sigma / sqrt_n;
  out.converged = converged;
  out.iterations_used = t;
  for (Index i = 0; i < out.alpha_hat.size(); ++i) {
    if (out.alpha_hat(i) != 0.0) out.outlier_indices.push_back(i);
  }
  return out;
}

}  // namespace rlasso
