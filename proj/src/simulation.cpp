#include "rlasso/simulation.hpp"

#include "rlasso/error.hpp"
#include "rlasso/inference.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace rlasso {

void DgpConfig::validate() const {
  if (n < 3) {
    throw Error(ErrorCode::kInvalidArgument, "DGP needs n >= 3");
  }
  if (!(p >= 0.0 && p < 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "contamination p must lie in [0, 0.5)");
  }
  if (!std::isfinite(outlier_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "outlier_scale must be finite");
  }
  if (beta_true.size() != 2 || !beta_true.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "beta_true must hold two finite values");
  }
}

GeneratedSample generate(const DgpConfig& config) {
  config.validate();
  const Index n = config.n;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal;

  Matrix x(n, 2);
  x.col(0).setOnes();
  for (Index i = 0; i < n; ++i) x(i, 1) = normal(rng);
  Vector eps(n);
  for (Index i = 0; i < n; ++i) eps(i) = normal(rng);

  GeneratedSample out;
  out.threshold = config.p > 0.0 ? normal_quantile(1.0 - config.p)
                                 : std::numeric_limits<double>::infinity();
  out.alpha_true = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (x(i, 1) >= out.threshold) out.alpha_true(i) = config.outlier_scale * x(i, 1);
  }
  out.beta_true = config.beta_true;
  Vector y = x * config.beta_true + out.alpha_true + eps;
  out.data = RegressionData(std::move(x), std::move(y));
  return out;
}

const char* to_string(PenaltyForm form) {
  return form == PenaltyForm::kConcentrated ? "concentrated" : "joint";
}

PenaltyForm parse_penalty_form(const std::string& name) {
  if (name == "concentrated") return PenaltyForm::kConcentrated;
  if (name == "joint") return PenaltyForm::kJoint;
  throw Error(ErrorCode::kInvalidArgument, "unknown penalty form '" + name + "'");
}

double concentrated_lambda(double lambda, PenaltyForm form) {
  return form == PenaltyForm::kJoint ? 0.5 * lambda : lambda;
}

namespace {

struct Accumulator {
  // Sums are taken in replication order so reports are bitwise reproducible.
  std::vector<double> sum_err;
  std::vector<double> sum_sq_err;
  std::vector<double> sum_cover;
  std::vector<std::vector<double>> estimates;

  explicit Accumulator(std::size_t k)
      : sum_err(k, 0.0), sum_sq_err(k, 0.0), sum_cover(k, 0.0), estimates(k) {}

  void add(const Vector& est, const Vector& truth, const std::vector<bool>& covers) {
    for (std::size_t j = 0; j < sum_err.size(); ++j) {
      const auto jj = static_cast<Index>(j);
      const double e = est(jj) - truth(jj);
      sum_err[j] += e;
      sum_sq_err[j] += e * e;
      sum_cover[j] += covers[j] ? 1.0 : 0.0;
      estimates[j].push_back(est(jj));
    }
  }

  std::vector<CoefficientSummary> summarise(const Vector& truth) const {
    std::vector<CoefficientSummary> out(sum_err.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double m = static_cast<double>(estimates[j].size());
      if (m == 0.0) continue;
      double mean = 0.0;
      for (double v : estimates[j]) mean += v;
      mean /= m;
      double var = 0.0;
      for (double v : estimates[j]) var += (v - mean) * (v - mean);
      out[j].bias = mean - truth(static_cast<Index>(j));
      out[j].variance = var / m;
      out[j].mse = sum_sq_err[j] / m;
      out[j].coverage = sum_cover[j] / m;
    }
    return out;
  }
};

std::vector<bool> covers(const InferenceReport& rep, const Vector& truth) {
  std::vector<bool> out;
  for (std::size_t j = 0; j < rep.intervals.size(); ++j) {
    out.push_back(rep.intervals[j].contains(truth(static_cast<Index>(j))));
  }
  return out;
}

}  // namespace

StudyReport run_study(const DgpConfig& dgp, const FitConfig& fit_config,
                      const StudyOptions& options) {
  dgp.validate();
  fit_config.validate();
  if (options.replications < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a study needs at least 2 replications");
  }
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "confidence level must lie in (0, 1)");
  }
  const auto start = std::chrono::steady_clock::now();

  StudyReport report;
  report.dgp = dgp;
  report.fit_config = fit_config;
  report.options = options;
  report.lambda_concentrated = concentrated_lambda(fit_config.lambda, options.penalty_form);

  FitConfig robust_cfg = fit_config;
  robust_cfg.lambda = report.lambda_concentrated;

  Accumulator robust(2);
  Accumulator ols(2);
  for (int r = 0; r < options.replications; ++r) {
    DgpConfig cfg = dgp;
    cfg.seed = derive_seed(options.seed, static_cast<std::uint64_t>(r));
    const GeneratedSample sample = generate(cfg);

    ReplicationDraw draw;
    draw.replication = r;
    draw.seed = cfg.seed;
    draw.true_outliers = (sample.alpha_true.array() != 0.0).count();
    try {
      const LeastSquares ls(sample.data.x());
      const FitResult rob = fit(sample.data, ls, robust_cfg);
      const InferenceReport rob_inf = confidence_intervals(sample.data, rob, options.level);

      FitResult naive;
      naive.beta_hat = ls.solve(sample.data.y());
      naive.alpha_hat = Vector::Zero(sample.data.n());
      const InferenceReport ols_inf = confidence_intervals(sample.data, naive, options.level);

      draw.robust_beta = rob.beta_hat;
      draw.ols_beta = naive.beta_hat;
      draw.robust_covers = covers(rob_inf, sample.beta_true);
      draw.ols_covers = covers(ols_inf, sample.beta_true);
      draw.flagged_outliers = static_cast<Index>(rob.outlier_indices.size());
      draw.iterations = rob.iterations_used;
      robust.add(draw.robust_beta, sample.beta_true, draw.robust_covers);
      ols.add(draw.ols_beta, sample.beta_true, draw.ols_covers);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kRankDeficient) throw;
      draw.failed = true;
      ++report.failures;
    }
    if (options.keep_draws) report.draws.push_back(std::move(draw));
  }
  report.replications = options.replications - report.failures;
  report.robust = robust.summarise(dgp.beta_true);
  report.naive_ols = ols.summarise(dgp.beta_true);
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

nlohmann::json summary_json(const std::vector<CoefficientSummary>& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : s) {
    arr.push_back({{"bias", c.bias},
                   {"abs_bias", std::abs(c.bias)},
                   {"variance", c.variance},
                   {"mse", c.mse},
                   {"coverage", c.coverage}});
  }
  return arr;
}

}  // namespace

nlohmann::json to_json(const StudyReport& report) {
  const auto& d = report.dgp;
  const auto& f = report.fit_config;
  nlohmann::json j;
  j["schema_version"] = 1;
  j["dgp"] = {{"n", d.n},
              {"p", d.p},
              {"outlier_scale", d.outlier_scale},
              {"beta_true", std::vector<double>(d.beta_true.data(),
                                                d.beta_true.data() + d.beta_true.size())}};
  j["fit"] = {{"lambda", f.lambda},
              {"penalty_form", to_string(report.options.penalty_form)},
              {"lambda_concentrated", report.lambda_concentrated},
              {"max_iters", f.max_iters},
              {"rel_tol", f.rel_tol},
              {"init_policy", f.init_policy == InitPolicy::kZeroAlpha ? "zero_alpha"
                                                                      : "ols_residual_alpha"}};
  j["seed"] = report.options.seed;
  j["level"] = report.options.level;
  j["replications"] = report.replications;
  j["failures"] = report.failures;
  j["estimators"] = {{"robust", summary_json(report.robust)},
                     {"naive_ols", summary_json(report.naive_ols)}};
  j["runtime_seconds"] = report.runtime_seconds;
  return j;
}

std::string table_csv(const StudyReport& report) {
  std::ostringstream out;
  out << std::setprecision(10);
  out << "value,p,n,robust_b1,ols_b1,robust_b2,ols_b2\n";
  auto row = [&](const char* name, auto get) {
    out << name << ',' << report.dgp.p << ',' << report.dgp.n;
    for (std::size_t j = 0; j < report.robust.size(); ++j) {
      out << ',' << get(report.robust[j]) << ',' << get(report.naive_ols[j]);
    }
    out << '\n';
  };
  row("bias", [](const CoefficientSummary& c) { return std::abs(c.bias); });
  row("variance", [](const CoefficientSummary& c) { return c.variance; });
  row("mse", [](const CoefficientSummary& c) { return c.mse; });
  row("coverage", [](const CoefficientSummary& c) { return c.coverage; });
  return out.str();
}

std::string draws_csv(const StudyReport& report) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "replication,seed,failed,robust_b1,robust_b2,ols_b1,ols_b2,"
         "robust_cover_b1,robust_cover_b2,ols_cover_b1,ols_cover_b2,"
         "true_outliers,flagged_outliers,iterations\n";
  for (const auto& d : report.draws) {
    out << d.replication << ',' << d.seed << ',' << (d.failed ? 1 : 0);
    if (d.failed) {
      out << ",,,,,,,,,,,\n";
      continue;
    }
    out << ',' << d.robust_beta(0) << ',' << d.robust_beta(1) << ',' << d.ols_beta(0) << ','
        << d.ols_beta(1) << ',' << d.robust_covers[0] << ',' << d.robust_covers[1] << ','
        << d.ols_covers[0] << ',' << d.ols_covers[1] << ',' << d.true_outliers << ','
        << d.flagged_outliers << ',' << d.iterations << '\n';
  }
  return out.str();
}

}  // namespace rlasso
