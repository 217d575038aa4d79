#pragma once

#include "rlasso/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rlasso {

enum class PenaltyKind { kGaussian, kSubGaussian, kSubExponential, kMonteCarlo, kFixed };

/// Noise law simulated by the Monte-Carlo calibrator. The statistic is
/// scale-free, so only the shape of the law matters.
enum class NoiseLaw { kGaussian, kLaplace };

const char* to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(const std::string& name);
const char* to_string(NoiseLaw law);
NoiseLaw parse_noise_law(const std::string& name);

struct PenaltyRule {
  PenaltyKind kind = PenaltyKind::kGaussian;
  /// 1.005 reproduces lambda = 2.01 sqrt(2 log n) for the Gaussian rule.
  double c = 1.005;
  double level = 0.95;
  int draws = 1000;
  double fixed_value = 0.0;
  NoiseLaw noise = NoiseLaw::kGaussian;

  void validate() const;
};

/// gaussian: 2c sqrt(2 ln n); subgaussian: c sqrt(ln n); subexponential:
/// c ln n; fixed: fixed_value. Throws kInvalidRule for monte_carlo and
/// kDomainError for n < 2.
double lambda_closed_form(const PenaltyRule& rule, Index n);

/// 2 sqrt(n) ||M_X e||_inf / ||M_X e||_2: the smallest lambda for which the
/// noise-only problem keeps alpha = 0 with the usual factor-two margin.
double penalty_statistic(const LeastSquares& ls, const Vector& eps);

/// rule.draws samples of penalty_statistic under rule.noise. Draw d uses its
/// own generator seeded with derive_seed(seed, d), so the sample does not
/// depend on evaluation order.
std::vector<double> penalty_statistic_draws(const LeastSquares& ls, const PenaltyRule& rule,
                                            std::uint64_t seed);

/// ceil(level * m)-th smallest sample (1-based, inclusive).
double empirical_quantile(std::vector<double> samples, double level);

/// Empirical rule.level-quantile of the penalty statistic for design x.
double calibrate_lambda_monte_carlo(const Matrix& x, const PenaltyRule& rule,
                                    std::uint64_t seed);

/// Dispatches to the closed form or the calibrator depending on rule.kind.
double select_lambda(const PenaltyRule& rule, const Matrix& x, std::uint64_t seed);

}  // namespace rlasso
