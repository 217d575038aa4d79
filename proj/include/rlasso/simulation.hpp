#pragma once

#include "rlasso/model.hpp"
#include "rlasso/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace rlasso {

/// Two-regressor contamination design: x = [1, N(0,1)], eps ~ N(0,1) and
/// alpha_i = outlier_scale * x2_i whenever x2_i >= q, where q is the
/// population N(0,1) quantile with P(x2 >= q) = p.
struct DgpConfig {
  Index n = 100;
  double p = 0.0;
  double outlier_scale = 5.0;
  std::uint64_t seed = 0;
  Vector beta_true = Vector::Zero(2);

  void validate() const;
};

struct GeneratedSample {
  RegressionData data;
  Vector alpha_true;
  Vector beta_true;
  double threshold = 0.0;  ///< q; +inf when p = 0
};

/// Deterministic in config.seed. Draw order: all x2, then all eps.
GeneratedSample generate(const DgpConfig& config);

/// How a user-facing lambda maps onto the solver's concentrated objective.
///
/// kConcentrated: lambda multiplies ||alpha||_1 / n next to ||r||_2 / sqrt(n).
/// kJoint: lambda is the weight in sigma/2 + ||r||^2/(2 sigma) +
/// lambda/(2 sqrt(n)) ||alpha||_1, i.e. half of it in concentrated form. The
/// reference contamination tables use this parametrisation.
enum class PenaltyForm { kConcentrated, kJoint };

const char* to_string(PenaltyForm form);
PenaltyForm parse_penalty_form(const std::string& name);
double concentrated_lambda(double lambda, PenaltyForm form);

struct StudyOptions {
  int replications = 1000;
  std::uint64_t seed = 0;
  double level = 0.95;
  PenaltyForm penalty_form = PenaltyForm::kConcentrated;
  bool keep_draws = false;
};

struct CoefficientSummary {
  double bias = 0.0;      ///< mean(beta_hat - beta), signed
  double variance = 0.0;  ///< mean((beta_hat - mean beta_hat)^2)
  double mse = 0.0;       ///< mean((beta_hat - beta)^2)
  double coverage = 0.0;
};

struct ReplicationDraw {
  int replication = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  Vector robust_beta;
  Vector ols_beta;
  std::vector<bool> robust_covers;
  std::vector<bool> ols_covers;
  Index true_outliers = 0;
  Index flagged_outliers = 0;
  int iterations = 0;
};

struct StudyReport {
  DgpConfig dgp;
  FitConfig fit_config;
  StudyOptions options;
  double lambda_concentrated = 0.0;
  int replications = 0;
  int failures = 0;
  std::vector<CoefficientSummary> robust;
  std::vector<CoefficientSummary> naive_ols;
  double runtime_seconds = 0.0;
  std::vector<ReplicationDraw> draws;  ///< filled only with keep_draws
};

/// Fits the robust estimator and naive OLS on options.replications samples
/// drawn with seeds derive_seed(options.seed, r). fit_config.lambda is read
/// in options.penalty_form. Replications failing with kRankDeficient are
/// counted and left out of the aggregates.
StudyReport run_study(const DgpConfig& dgp, const FitConfig& fit_config,
                      const StudyOptions& options);

nlohmann::json to_json(const StudyReport& report);

/// Rows bias/variance/mse/coverage; columns value,p,n,robust_b1,ols_b1,robust_b2,ols_b2.
/// Bias is reported as a magnitude.
std::string table_csv(const StudyReport& report);

/// One row per replication; needs keep_draws.
std::string draws_csv(const StudyReport& report);

}  // namespace rlasso
