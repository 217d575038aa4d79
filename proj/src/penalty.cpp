#include "rlasso/penalty.hpp"

#include "rlasso/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rlasso {

const char* to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kGaussian: return "gaussian";
    case PenaltyKind::kSubGaussian: return "subgaussian";
    case PenaltyKind::kSubExponential: return "subexponential";
    case PenaltyKind::kMonteCarlo: return "monte_carlo";
    case PenaltyKind::kFixed: return "fixed";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(const std::string& name) {
  for (auto kind : {PenaltyKind::kGaussian, PenaltyKind::kSubGaussian,
                    PenaltyKind::kSubExponential, PenaltyKind::kMonteCarlo,
                    PenaltyKind::kFixed}) {
    if (name == to_string(kind)) return kind;
  }
  throw Error(ErrorCode::kInvalidRule, "unknown penalty rule '" + name + "'");
}

const char* to_string(NoiseLaw law) {
  return law == NoiseLaw::kGaussian ? "gaussian" : "laplace";
}

NoiseLaw parse_noise_law(const std::string& name) {
  if (name == "gaussian") return NoiseLaw::kGaussian;
  if (name == "laplace") return NoiseLaw::kLaplace;
  throw Error(ErrorCode::kInvalidRule, "unknown noise law '" + name + "'");
}

void PenaltyRule::validate() const {
  if (kind == PenaltyKind::kGaussian && !(c > 1.0)) {
    throw Error(ErrorCode::kInvalidRule, "gaussian rule needs c > 1");
  }
  if ((kind == PenaltyKind::kSubGaussian || kind == PenaltyKind::kSubExponential) &&
      !(c > 0.0)) {
    throw Error(ErrorCode::kInvalidRule, "c must be > 0");
  }
  if (kind == PenaltyKind::kMonteCarlo) {
    if (!(level > 0.0 && level < 1.0)) {
      throw Error(ErrorCode::kInvalidRule, "level must lie in (0, 1)");
    }
    if (draws < 100) {
      throw Error(ErrorCode::kInvalidRule, "monte_carlo rule needs at least 100 draws");
    }
  }
  if (kind == PenaltyKind::kFixed && !(fixed_value >= 0.0 && std::isfinite(fixed_value))) {
    throw Error(ErrorCode::kInvalidRule, "fixed penalty must be finite and >= 0");
  }
}

double lambda_closed_form(const PenaltyRule& rule, Index n) {
  if (rule.kind == PenaltyKind::kMonteCarlo) {
    throw Error(ErrorCode::kInvalidRule,
                "monte_carlo rule has no closed form; use calibrate_lambda_monte_carlo");
  }
  rule.validate();
  if (rule.kind == PenaltyKind::kFixed) return rule.fixed_value;
  if (n < 2) {
    throw Error(ErrorCode::kDomainError, "closed-form penalties need n >= 2");
  }
  const double log_n = std::log(static_cast<double>(n));
  switch (rule.kind) {
    case PenaltyKind::kGaussian: return 2.0 * rule.c * std::sqrt(2.0 * log_n);
    case PenaltyKind::kSubGaussian: return rule.c * std::sqrt(log_n);
    case PenaltyKind::kSubExponential: return rule.c * log_n;
    default: break;
  }
  throw Error(ErrorCode::kInvalidRule, "unsupported rule");
}

double penalty_statistic(const LeastSquares& ls, const Vector& eps) {
  const Vector m = ls.residual(eps);
  const double l2 = m.norm();
  if (!(l2 > 0.0)) {
    throw Error(ErrorCode::kDomainError, "projected noise vanished");
  }
  const double n = static_cast<double>(ls.rows());
  return 2.0 * std::sqrt(n) * m.lpNorm<Eigen::Infinity>() / l2;
}

std::vector<double> penalty_statistic_draws(const LeastSquares& ls, const PenaltyRule& rule,
                                            std::uint64_t seed) {
  const Index n = ls.rows();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(rule.draws));
  Vector eps(n);
  for (int d = 0; d < rule.draws; ++d) {
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    if (rule.noise == NoiseLaw::kGaussian) {
      std::normal_distribution<double> normal;
      for (Index i = 0; i < n; ++i) eps(i) = normal(rng);
    } else {
      std::exponential_distribution<double> expo;
      std::bernoulli_distribution sign;
      for (Index i = 0; i < n; ++i) eps(i) = sign(rng) ? expo(rng) : -expo(rng);
    }
    out.push_back(penalty_statistic(ls, eps));
  }
  return out;
}

double empirical_quantile(std::vector<double> samples, double level) {
  if (samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "quantile of an empty sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "level must lie in (0, 1)");
  }
  const auto m = samples.size();
  auto rank = static_cast<std::size_t>(std::ceil(level * static_cast<double>(m)));
  rank = std::clamp<std::size_t>(rank, 1, m);
  auto nth = samples.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(samples.begin(), nth, samples.end());
  return *nth;
}

double calibrate_lambda_monte_carlo(const Matrix& x, const PenaltyRule& rule,
                                    std::uint64_t seed) {
  rule.validate();
  if (rule.draws < 100) {
    throw Error(ErrorCode::kInvalidRule, "monte_carlo calibration needs at least 100 draws");
  }
  if (!(rule.level > 0.0 && rule.level < 1.0)) {
    throw Error(ErrorCode::kInvalidRule, "level must lie in (0, 1)");
  }
  if (x.rows() <= x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "calibration needs n > K");
  }
  const LeastSquares ls(x);
  return empirical_quantile(penalty_statistic_draws(ls, rule, seed), rule.level);
}

double select_lambda(const PenaltyRule& rule, const Matrix& x, std::uint64_t seed) {
  if (rule.kind == PenaltyKind::kMonteCarlo) {
    return calibrate_lambda_monte_carlo(x, rule, seed);
  }
  return lambda_closed_form(rule, x.rows());
}

}  // namespace rlasso
