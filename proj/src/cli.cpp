#include "rlasso/cli.hpp"

#include "rlasso/csv.hpp"
#include "rlasso/error.hpp"
#include "rlasso/inference.hpp"
#include "rlasso/penalty.hpp"
#include "rlasso/simulation.hpp"
#include "rlasso/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

namespace rlasso::cli {

namespace {

using nlohmann::json;

struct PenaltyFlags {
  std::optional<double> lambda;
  std::string rule = "gaussian";
  double c = 1.005;
  int mc_draws = 1000;
  double mc_level = 0.95;
  std::string noise = "gaussian";
  std::string form = "joint";
};

struct SolverFlags {
  int max_iters = 100;
  double tol = 1e-10;
  std::string init = "zero";
};

struct Options {
  std::string input;
  std::string output;
  bool intercept = false;
  std::uint64_t seed = 0;
  double level = 0.95;
  PenaltyFlags penalty;
  SolverFlags solver;
  // simulate
  long long n = 100;
  double p = 0.025;
  int reps = 1000;
  double outlier_scale = 5.0;
  std::vector<double> beta_true{0.0, 0.0};
  std::string table_csv;
  std::string draws_csv;
};

// Round-trippable rendering for the run log without touching the stream state.
std::string exact(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

class FlagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_penalty_flags(CLI::App* cmd, PenaltyFlags& f, bool with_lambda) {
  CLI::Option* rule =
      cmd->add_option("--penalty-rule", f.rule,
                      "gaussian | subgaussian | subexponential | monte_carlo")
          ->capture_default_str();
  if (with_lambda) {
    CLI::Option* lambda = cmd->add_option("--lambda", f.lambda, "Fixed penalty level");
    lambda->excludes(rule);
  }
  cmd->add_option("--c", f.c, "Multiplier of the closed-form rule")->capture_default_str();
  cmd->add_option("--mc-draws", f.mc_draws, "Monte-Carlo draws")->capture_default_str();
  cmd->add_option("--mc-level", f.mc_level, "Monte-Carlo quantile level")
      ->capture_default_str();
  cmd->add_option("--noise", f.noise, "Calibration noise law: gaussian | laplace")
      ->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--max-iters", o.solver.max_iters, "Iteration budget")->capture_default_str();
  cmd->add_option("--tol", o.solver.tol, "Relative objective-change tolerance")
      ->capture_default_str();
  cmd->add_option("--init", o.solver.init, "Initial alpha: zero | ols")->capture_default_str();
  cmd->add_option("--penalty-form", o.penalty.form,
                  "How lambda is read: concentrated | joint (joint = half in concentrated form)")
      ->capture_default_str();
}

PenaltyRule make_rule(const PenaltyFlags& f) {
  PenaltyRule rule;
  try {
    rule.kind = parse_penalty_kind(f.rule);
    rule.noise = parse_noise_law(f.noise);
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  if (rule.kind == PenaltyKind::kFixed) {
    throw FlagError("use --lambda for a fixed penalty");
  }
  rule.c = f.c;
  rule.draws = f.mc_draws;
  rule.level = f.mc_level;
  try {
    rule.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  return rule;
}

FitConfig make_fit_config(const Options& o) {
  FitConfig cfg;
  cfg.max_iters = o.solver.max_iters;
  cfg.rel_tol = o.solver.tol;
  if (o.solver.init == "zero") {
    cfg.init_policy = InitPolicy::kZeroAlpha;
  } else if (o.solver.init == "ols") {
    cfg.init_policy = InitPolicy::kOlsResidualAlpha;
  } else {
    throw FlagError("--init must be 'zero' or 'ols'");
  }
  return cfg;
}

PenaltyForm make_form(const std::string& name) {
  try {
    return parse_penalty_form(name);
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
}

void check_level(double level, const char* flag) {
  if (!(level > 0.0 && level < 1.0)) {
    throw FlagError(std::string(flag) + " must lie in (0, 1)");
  }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw CsvError("cannot write '" + path + "'");
  f << text;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

int cmd_fit(const Options& o, std::ostream& out, std::ostream& err) {
  check_level(o.level, "--level");
  FitConfig cfg = make_fit_config(o);
  const PenaltyForm form = make_form(o.penalty.form);
  std::optional<PenaltyRule> rule;
  if (!o.penalty.lambda) rule = make_rule(o.penalty);
  if (o.penalty.lambda && !(*o.penalty.lambda >= 0.0)) throw FlagError("--lambda must be >= 0");

  const CsvDesign design = design_from_csv(read_numeric_csv_file(o.input), o.intercept, true);
  const RegressionData data = validate(design.data);

  const double lambda = o.penalty.lambda ? *o.penalty.lambda
                                         : select_lambda(*rule, data.x(), o.seed);
  cfg.lambda = concentrated_lambda(lambda, form);
  cfg.validate();

  err << "rlasso fit: input=" << o.input << " n=" << data.n() << " K=" << data.k()
      << " lambda=" << exact(lambda) << " penalty_form=" << to_string(form)
      << " rule=" << (rule ? to_string(rule->kind) : "fixed") << " c=" << o.penalty.c
      << " seed=" << o.seed << " max_iters=" << cfg.max_iters << " tol=" << cfg.rel_tol
      << '\n';

  const FitResult res = fit(data, cfg);
  const InferenceReport inf = confidence_intervals(data, res, o.level);

  json report;
  report["schema_version"] = 1;
  report["n"] = data.n();
  report["k"] = data.k();
  report["regressors"] = design.regressors;
  report["beta_hat"] = to_std(res.beta_hat);
  report["se"] = to_std(inf.std_errors);
  json intervals = json::array();
  for (const auto& iv : inf.intervals) intervals.push_back({iv.lower, iv.upper});
  report["intervals"] = intervals;
  report["z_stats"] = to_std(inf.z_stats);
  report["level"] = o.level;
  report["sigma_hat"] = res.sigma_hat;
  report["sigma2_hat"] = inf.sigma2_hat;
  report["lambda_used"] = lambda;
  report["lambda_concentrated"] = cfg.lambda;
  report["penalty"] = {{"rule", rule ? to_string(rule->kind) : "fixed"},
                       {"c", o.penalty.c},
                       {"form", to_string(form)},
                       {"seed", o.seed}};
  if (rule && rule->kind == PenaltyKind::kMonteCarlo) {
    report["penalty"]["mc_draws"] = rule->draws;
    report["penalty"]["mc_level"] = rule->level;
    report["penalty"]["noise"] = to_string(rule->noise);
  }
  json outliers = json::array();
  for (Index i : res.outlier_indices) {
    outliers.push_back({{"index", i}, {"alpha_hat", res.alpha_hat(i)}});
  }
  report["outliers"] = outliers;
  report["iterations"] = res.iterations_used;
  report["converged"] = res.converged;
  json warnings = json::array();
  for (auto w : res.warnings) warnings.push_back(to_string(w));
  report["warnings"] = warnings;
  report["objective"] = res.objective_trace.back();

  emit(report.dump(2) + "\n", o.output, out);
  return kOk;
}

int cmd_calibrate(const Options& o, std::ostream& out, std::ostream& err) {
  PenaltyFlags flags = o.penalty;
  flags.rule = "monte_carlo";
  const PenaltyRule rule = make_rule(flags);

  const CsvDesign design = design_from_csv(read_numeric_csv_file(o.input), o.intercept, false);
  const Matrix& x = design.data.x();
  if (!x.allFinite()) throw Error(ErrorCode::kNonFinite, "design contains NaN or Inf");
  if (x.rows() <= x.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "need more rows than regressors");
  }

  PenaltyRule gaussian;
  gaussian.c = o.penalty.c;
  if (!(gaussian.c > 1.0)) throw FlagError("--c must be > 1 for the Gaussian closed form");

  err << "rlasso calibrate: input=" << o.input << " n=" << x.rows() << " K=" << x.cols()
      << " draws=" << rule.draws << " level=" << rule.level
      << " noise=" << to_string(rule.noise) << " seed=" << o.seed << '\n';

  const double calibrated = calibrate_lambda_monte_carlo(x, rule, o.seed);
  json report;
  report["schema_version"] = 1;
  report["n"] = x.rows();
  report["k"] = x.cols();
  report["calibrated_lambda"] = calibrated;
  report["gaussian_closed_form_lambda"] = lambda_closed_form(gaussian, x.rows());
  report["gaussian_c"] = gaussian.c;
  report["mc_level"] = rule.level;
  report["mc_draws"] = rule.draws;
  report["noise"] = to_string(rule.noise);
  report["seed"] = o.seed;
  emit(report.dump(2) + "\n", o.output, out);
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.reps < 2) throw FlagError("--reps must be >= 2 (variance is undefined otherwise)");
  check_level(o.level, "--level");
  if (o.beta_true.size() != 2) throw FlagError("--beta-true takes exactly two values");

  DgpConfig dgp;
  dgp.n = static_cast<Index>(o.n);
  dgp.p = o.p;
  dgp.outlier_scale = o.outlier_scale;
  dgp.seed = o.seed;
  dgp.beta_true = Eigen::Map<const Vector>(o.beta_true.data(), 2);
  try {
    dgp.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }

  FitConfig cfg = make_fit_config(o);
  StudyOptions opts;
  opts.replications = o.reps;
  opts.seed = o.seed;
  opts.level = o.level;
  opts.penalty_form = make_form(o.penalty.form);
  opts.keep_draws = !o.draws_csv.empty();

  std::string rule_name = "fixed";
  if (o.penalty.lambda) {
    if (!(*o.penalty.lambda >= 0.0)) throw FlagError("--lambda must be >= 0");
    cfg.lambda = *o.penalty.lambda;
  } else {
    const PenaltyRule rule = make_rule(o.penalty);
    if (rule.kind == PenaltyKind::kMonteCarlo) {
      throw FlagError("simulate needs a closed-form rule or --lambda");
    }
    rule_name = to_string(rule.kind);
    try {
      cfg.lambda = lambda_closed_form(rule, dgp.n);
    } catch (const Error& e) {
      throw FlagError(e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }

  err << "rlasso simulate: n=" << dgp.n << " p=" << dgp.p << " outlier_scale="
      << dgp.outlier_scale << " reps=" << opts.replications << " seed=" << opts.seed
      << " lambda=" << exact(cfg.lambda) << " rule=" << rule_name
      << " c=" << o.penalty.c << " penalty_form=" << to_string(opts.penalty_form)
      << " max_iters=" << cfg.max_iters << " tol=" << cfg.rel_tol << '\n';

  const StudyReport report = run_study(dgp, cfg, opts);
  json j = to_json(report);
  j["fit"]["rule"] = rule_name;
  emit(j.dump(2) + "\n", o.output, out);
  if (!o.table_csv.empty()) emit(table_csv(report), o.table_csv, out);
  if (!o.draws_csv.empty()) emit(draws_csv(report), o.draws_csv, out);

  if (report.failures > 0) {
    err << "error: " << report.failures << " replication(s) failed (rank deficient design)\n";
    return kReplicationFailures;
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Outlier-robust square-root lasso regression"};
  app.require_subcommand(1);

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a CSV dataset and report inference");
  fit_cmd->add_option("--input,-i", o.input, "CSV with header and a 'y' column")->required();
  fit_cmd->add_option("--output,-o", o.output, "JSON report path (default stdout)");
  fit_cmd->add_flag("--intercept", o.intercept, "Prepend a column of ones");
  fit_cmd->add_option("--level", o.level, "Confidence level")->capture_default_str();
  fit_cmd->add_option("--seed", o.seed, "Seed for Monte-Carlo penalty calibration")
      ->capture_default_str();
  add_penalty_flags(fit_cmd, o.penalty, true);
  add_solver_flags(fit_cmd, o);

  CLI::App* cal_cmd = app.add_subcommand("calibrate", "Monte-Carlo penalty calibration");
  cal_cmd->add_option("--input,-i", o.input, "CSV design ('y' column ignored)")->required();
  cal_cmd->add_option("--output,-o", o.output, "JSON output path (default stdout)");
  cal_cmd->add_flag("--intercept", o.intercept, "Prepend a column of ones");
  cal_cmd->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  cal_cmd->add_option("--c", o.penalty.c, "Multiplier for the Gaussian closed form")
      ->capture_default_str();
  cal_cmd->add_option("--mc-draws", o.penalty.mc_draws, "Monte-Carlo draws")
      ->capture_default_str();
  cal_cmd->add_option("--mc-level", o.penalty.mc_level, "Quantile level")
      ->capture_default_str();
  cal_cmd->add_option("--noise", o.penalty.noise, "gaussian | laplace")->capture_default_str();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo study on the contamination DGP");
  sim_cmd->add_option("--n", o.n, "Sample size")->capture_default_str();
  sim_cmd->add_option("--p", o.p, "Contamination proportion")->capture_default_str();
  sim_cmd->add_option("--reps", o.reps, "Replications")->capture_default_str();
  sim_cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--outlier-scale", o.outlier_scale, "Outlier multiplier")
      ->capture_default_str();
  sim_cmd->add_option("--beta-true", o.beta_true, "True coefficients (two values)")
      ->expected(2);
  sim_cmd->add_option("--level", o.level, "Confidence level")->capture_default_str();
  sim_cmd->add_option("--output,-o", o.output, "JSON report path (default stdout)");
  sim_cmd->add_option("--table-csv", o.table_csv, "Table-shaped CSV path");
  sim_cmd->add_option("--draws-csv", o.draws_csv, "Per-replication CSV path");
  add_penalty_flags(sim_cmd, o.penalty, true);
  add_solver_flags(sim_cmd, o);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidFlags;
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(o, out, err);
    if (cal_cmd->parsed()) return cmd_calibrate(o, out, err);
    return cmd_simulate(o, out, err);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidFlags;
  } catch (const CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::kRankDeficient: return kRankDeficient;
      case ErrorCode::kDimensionMismatch:
      case ErrorCode::kNonFinite: return kInputError;
      default: return kInvalidFlags;
    }
  }
}

}  // namespace rlasso::cli
