#include "rlasso/cli.hpp"
#include "rlasso/model.hpp"
#include "rlasso/simulation.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace rlasso {
namespace {

using nlohmann::json;

std::string tmp_path(const std::string& name) {
  return std::string(RLASSO_TEST_TMPDIR) + "/cli_" + name;
}

std::string write_file(const std::string& name, const std::string& contents) {
  const std::string path = tmp_path(name);
  std::ofstream(path) << contents;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
  json report() const { return json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "rlasso-cli");
  std::ostringstream out, err;
  CliRun r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string sample_csv(const GeneratedSample& s) {
  std::ostringstream os;
  os << std::setprecision(17) << "x2,y\n";
  for (Index i = 0; i < s.data.n(); ++i) os << s.data.x()(i, 1) << ',' << s.data.y()(i) << '\n';
  return os.str();
}

TEST(CliFit, LargeLambdaIsOls) {
  const std::string in = write_file("line.csv", "x,y\n1,2\n2,4\n3,6\n4,8\n5,10\n");
  const CliRun r = run({"fit", "--input", in, "--lambda", "1e6"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.report();
  ASSERT_EQ(j["beta_hat"].size(), 1u);
  EXPECT_NEAR(j["beta_hat"][0].get<double>(), 2.0, 1e-12);
  EXPECT_TRUE(j["outliers"].empty());
  EXPECT_EQ(j["n"].get<int>(), 5);
  EXPECT_NE(r.err.find("lambda"), std::string::npos);
}

TEST(CliFit, NonNumericCellNamesRow) {
  const std::string in = write_file("bad.csv", "x,y\n1,2\n2,4\n3,abc\n4,8\n");
  const CliRun r = run({"fit", "--input", in});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("abc"), std::string::npos) << r.err;
}

TEST(CliFit, MissingFileIsInputError) {
  EXPECT_EQ(run({"fit", "--input", tmp_path("does_not_exist.csv")}).code, cli::kInputError);
}

TEST(CliFit, ContaminatedSampleBeatsOls) {
  DgpConfig dgp;
  dgp.p = 0.025;
  dgp.seed = 1;
  const GeneratedSample s = generate(dgp);
  const std::string in = write_file("contaminated.csv", sample_csv(s));

  const CliRun a = run({"fit", "--input", in, "--intercept"});
  ASSERT_EQ(a.code, 0) << a.err;
  const CliRun b = run({"fit", "--input", in, "--intercept"});
  EXPECT_EQ(a.out, b.out);

  const json j = a.report();
  EXPECT_EQ(j["regressors"][0].get<std::string>(), "(intercept)");
  EXPECT_EQ(j["regressors"][1].get<std::string>(), "x2");
  EXPECT_EQ(j["penalty"]["rule"].get<std::string>(), "gaussian");
  EXPECT_FALSE(j["outliers"].empty());
  int true_hits = 0;
  for (const auto& o : j["outliers"]) {
    EXPECT_NE(o["alpha_hat"].get<double>(), 0.0);
    if (s.alpha_true(o["index"].get<Index>()) != 0.0) ++true_hits;
  }
  EXPECT_GT(true_hits, 0);
  EXPECT_EQ(j["penalty"]["form"].get<std::string>(), "joint");

  const Vector ols = least_squares(s.data.x(), s.data.y());
  const double robust_b2 = j["beta_hat"][1].get<double>();
  EXPECT_LT(std::abs(robust_b2 - s.beta_true(1)), std::abs(ols(1) - s.beta_true(1)));
}

TEST(CliFit, LambdaAndRuleAreExclusive) {
  const std::string in = write_file("excl.csv", "x,y\n1,2\n2,4\n3,6\n");
  const CliRun r = run({"fit", "--input", in, "--lambda", "1", "--penalty-rule", "gaussian"});
  EXPECT_EQ(r.code, cli::kInvalidFlags);
}

TEST(CliFit, CollinearDesignIsRankDeficient) {
  const std::string in =
      write_file("collinear.csv", "a,b,y\n1,2,1\n2,4,3\n3,6,2\n4,8,5\n5,10,4\n");
  const CliRun r = run({"fit", "--input", in, "--lambda", "2"});
  EXPECT_EQ(r.code, cli::kRankDeficient) << r.err;
}

TEST(CliFit, UnknownFlagIsInvalid) {
  const std::string in = write_file("unknown.csv", "x,y\n1,2\n2,4\n3,6\n");
  EXPECT_EQ(run({"fit", "--input", in, "--bogus"}).code, cli::kInvalidFlags);
}

TEST(CliFit, WritesOutputFile) {
  const std::string in = write_file("outfile.csv", "x,y\n1,2\n2,4.5\n3,6\n4,7.5\n");
  const std::string out = tmp_path("outfile.json");
  const CliRun r = run({"fit", "--input", in, "--lambda", "3", "--output", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(read_file(out));
  EXPECT_EQ(j["schema_version"].get<int>(), 1);
  EXPECT_EQ(j["intervals"].size(), 1u);
}

TEST(CliCalibrate, InterceptOnlyTwoRows) {
  const std::string in = write_file("two.csv", "y\n0.3\n-1.2\n");
  const CliRun r = run({"calibrate", "--input", in, "--intercept", "--mc-draws", "200"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.report()["calibrated_lambda"].get<double>(), 2.0, 1e-12);
}

TEST(CliCalibrate, SeedDeterminismAndLevel) {
  DgpConfig dgp;
  dgp.seed = 5;
  const std::string in = write_file("cal.csv", sample_csv(generate(dgp)));
  const std::vector<std::string> base = {"calibrate", "--input", in, "--intercept",
                                         "--seed", "17", "--mc-draws", "500"};
  const CliRun a = run(base);
  const CliRun b = run(base);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);

  std::vector<std::string> lo = base;
  lo.insert(lo.end(), {"--mc-level", "0.5"});
  std::vector<std::string> hi = base;
  hi.insert(hi.end(), {"--mc-level", "0.99"});
  EXPECT_LE(run(lo).report()["calibrated_lambda"].get<double>(),
            run(hi).report()["calibrated_lambda"].get<double>());
}

TEST(CliCalibrate, RejectsUnitMultiplier) {
  const std::string in = write_file("calc.csv", "x\n1\n2\n3\n4\n");
  EXPECT_EQ(run({"calibrate", "--input", in, "--c", "1"}).code, cli::kInvalidFlags);
}

TEST(CliSimulate, TableHasSixteenCells) {
  const std::string table = tmp_path("table.csv");
  const CliRun r = run({"simulate", "--n", "100", "--p", "0.025", "--reps", "50", "--seed", "3",
                     "--table-csv", table});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(read_file(table));
  std::string line;
  std::getline(in, line);
  int cells = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string cell;
    std::vector<std::string> parts;
    while (std::getline(row, cell, ',')) parts.push_back(cell);
    ASSERT_EQ(parts.size(), 7u);
    for (std::size_t c = 3; c < parts.size(); ++c) {
      EXPECT_TRUE(std::isfinite(std::stod(parts[c])));
      ++cells;
    }
  }
  EXPECT_EQ(cells, 16);
}

TEST(CliSimulate, CleanCoverage) {
  const CliRun r = run({"simulate", "--n", "100", "--p", "0", "--reps", "200", "--seed", "9"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = r.report();
  for (const auto& c : j["estimators"]["robust"]) {
    EXPECT_GE(c["coverage"].get<double>(), 0.90);
    EXPECT_LE(c["coverage"].get<double>(), 0.99);
  }
}

TEST(CliSimulate, RejectsBadFlags) {
  EXPECT_EQ(run({"simulate", "--reps", "1"}).code, cli::kInvalidFlags);
  EXPECT_EQ(run({"simulate", "--p", "0.6"}).code, cli::kInvalidFlags);
  EXPECT_EQ(run({"simulate", "--penalty-rule", "monte_carlo"}).code, cli::kInvalidFlags);
  EXPECT_EQ(run({"simulate", "--beta-true", "1"}).code, cli::kInvalidFlags);
}

TEST(CliSimulate, DrawsCsvHasOneRowPerReplication) {
  const std::string draws = tmp_path("draws.csv");
  const CliRun r = run({"simulate", "--reps", "7", "--draws-csv", draws});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string body = read_file(draws);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 8);
}

TEST(Cli, NoSubcommandIsInvalid) {
  EXPECT_EQ(run({}).code, cli::kInvalidFlags);
}

}  // namespace
}  // namespace rlasso
