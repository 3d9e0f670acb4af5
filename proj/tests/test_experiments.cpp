#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "ilcgap/config.hpp"
#include "ilcgap/errors.hpp"
#include "ilcgap/experiments.hpp"

using namespace ilcgap;
namespace fs = std::filesystem;

namespace {

std::string csv_of(const SweepTable& t) {
  std::ostringstream os;
  write_sweep_csv(os, t);
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ilcgap_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ILCGAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Grid, ExplicitLogAndLinearForms) {
  GridSpec g;
  g.values = {0.1, 0.2, 0.5};
  EXPECT_EQ(g.resolve(), (std::vector<double>{0.1, 0.2, 0.5}));

  GridSpec lg;
  lg.kind = GridSpec::Kind::kLog;
  lg.min = 1e-3;
  lg.max = 1.0;
  lg.points = 4;
  const auto v = lg.resolve();
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[1], 1e-2, 1e-15);
  EXPECT_EQ(v.back(), 1.0);

  GridSpec lin;
  lin.kind = GridSpec::Kind::kLinear;
  lin.start = 0.0;
  lin.stop = 0.3;
  lin.step = 0.1;
  EXPECT_EQ(lin.resolve(), (std::vector<double>{0.0, 0.1, 0.2, 0.3}));
}

TEST(Grid, RejectsEmptyOrUnsortedOrNonFinite) {
  GridSpec g;
  EXPECT_THROW(g.resolve(), ConfigError);
  g.values = {0.2, 0.1};
  EXPECT_THROW(g.resolve(), ConfigError);
  g.values = {0.1, std::numeric_limits<double>::infinity()};
  EXPECT_THROW(g.resolve(), ConfigError);
  GridSpec lg;
  lg.kind = GridSpec::Kind::kLog;
  lg.min = 0.0;
  lg.max = 1.0;
  lg.points = 3;
  EXPECT_THROW(lg.resolve(), ConfigError);
}

TEST(LinearSweep, ZeroErrorGivesZeroGaps) {
  auto cfg = LinearSweepConfig::defaults();
  cfg.grid = GridSpec{};
  cfg.grid.values = {0.0};
  const auto t = run_linear_sweep(cfg);
  EXPECT_EQ(t.rows.at(0).gap_mm, 0.0);
  EXPECT_NEAR(t.rows.at(0).gap_ilc, 0.0, 1e-15);
}

TEST(LinearSweep, GridBeyondCapIsAConfigError) {
  auto cfg = LinearSweepConfig::defaults();
  EXPECT_NEAR(linear_sweep_cap(cfg), std::sqrt(10.0), 1e-12);
  cfg.grid = GridSpec{};
  cfg.grid.values = {0.1, 4.0};
  EXPECT_THROW(run_linear_sweep(cfg), ConfigError);
  cfg.grid.values = {-0.1, 0.1};
  EXPECT_THROW(run_linear_sweep(cfg), ConfigError);
}

TEST(LinearSweep, DefaultGridShowsIlcAdvantage) {
  const auto t = run_linear_sweep(LinearSweepConfig::defaults());
  ASSERT_EQ(t.rows.size(), 40u);
  EXPECT_NEAR(t.rows.back().param, std::sqrt(10.0), 1e-12);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.flag_mm, RowFlag::kOk);
    EXPECT_EQ(r.flag_ilc, RowFlag::kOk);
    EXPECT_GE(r.gap_mm, 0.0);
    EXPECT_GE(r.gap_ilc, 0.0);
    EXPECT_LT(r.gap_ilc, r.gap_mm);
  }
}

TEST(Csv, HeaderOnlyForEmptyTable) {
  EXPECT_EQ(csv_of({}), "param,cost_opt,cost_mm,cost_ilc,gap_mm,gap_ilc,flag_mm,flag_ilc\n");
}

TEST(Csv, SentinelRowsAreWrittenWithFlags) {
  SweepTable t;
  t.rows.push_back({0.5, 1.0, kSentinelCost, 2.0, kSentinelCost - 1.0, 1.0, RowFlag::kDiverged,
                    RowFlag::kOk});
  const auto s = csv_of(t);
  EXPECT_NE(s.find("0.5,1,1000000000000,2,999999999999,1,diverged,ok"), std::string::npos) << s;
  t.rows[0].flag_ilc = RowFlag::kAssumptionViolated;
  EXPECT_NE(csv_of(t).find("assumption_violated"), std::string::npos);
}

TEST(Csv, NonFiniteValuesAreRejected) {
  SweepTable t;
  t.rows.push_back({0.5, 1.0, std::nan(""), 2.0, 0.0, 1.0, RowFlag::kOk, RowFlag::kOk});
  EXPECT_THROW(csv_of(t), InternalError);
}

TEST(Csv, ValuesRoundTripExactly) {
  SweepTable t;
  const double v = 0.1 + 0.2;
  t.rows.push_back({v, v, v, v, v, v, RowFlag::kOk, RowFlag::kOk});
  std::istringstream in(csv_of(t));
  std::string header, field;
  std::getline(in, header);
  std::getline(in, field, ',');
  EXPECT_EQ(std::stod(field), v);
}

TEST(Config, ParsesLinearSectionAndGridForms) {
  std::istringstream in(
      "[linear]\nA = 0.5 0; 0 0.5\nB = 1; 0\nQ = 1 0; 0 1\nQf = 2 0; 0 2\nR = 1\n"
      "x0 = 1, 1\nhorizon = 5\n[grid]\nkind = log\nmin = 1e-3\nmax = cap\npoints = 5\n");
  const auto cfg = parse_linear_config(in);
  EXPECT_EQ(cfg.horizon, 5);
  EXPECT_EQ(cfg.A(1, 1), 0.5);
  EXPECT_EQ(cfg.Qf(0, 0), 2.0);
  EXPECT_TRUE(cfg.grid.max_is_cap);
  EXPECT_EQ(cfg.grid.points, 5);
  EXPECT_EQ(cfg.grid.kind, GridSpec::Kind::kLog);
}

TEST(Config, RejectsUnknownKeysAndSections) {
  std::istringstream bad_key("[linear]\nhorizonn = 5\n");
  EXPECT_THROW(parse_linear_config(bad_key), ConfigError);
  std::istringstream bad_section("[linearr]\nhorizon = 5\n");
  EXPECT_THROW(parse_linear_config(bad_section), ConfigError);
  std::istringstream bad_sign("[pendulum]\ngravity_sign = 0.5\n");
  EXPECT_THROW(parse_pendulum_config(bad_sign), ConfigError);
}

TEST(Config, MissingKeysKeepDefaults) {
  std::istringstream in("[pendulum]\ndt = 0.1\n[ilqr]\nmax_iters = 50\n");
  const auto cfg = parse_pendulum_config(in);
  EXPECT_EQ(cfg.params.dt, 0.1);
  EXPECT_EQ(cfg.ilqr.max_iters, 50);
  EXPECT_EQ(cfg.params.m, 1.0);
  EXPECT_EQ(cfg.torque_weight, 0.1);
}

TEST(Config, MatrixParsing) {
  const Mat m = parse_matrix("1 1; -3 1");
  EXPECT_EQ(m.rows(), 2);
  EXPECT_EQ(m(1, 0), -3.0);
  EXPECT_THROW(parse_matrix("1 2; 3"), ConfigError);
  EXPECT_THROW(parse_matrix("1 x"), ConfigError);
  EXPECT_EQ(parse_vector("0.1, 0.2").size(), 2);
}

TEST(Config, UnreadableFileIsAnIoError) {
  EXPECT_THROW(load_linear_config("/nonexistent/dir/file.ini"), IoError);
  EXPECT_NO_THROW(load_linear_config(""));
}

TEST(Determinism, SweepsIndependentOfJobCount) {
  auto lin = LinearSweepConfig::defaults();
  EXPECT_EQ(csv_of(run_linear_sweep(lin, 1)), csv_of(run_linear_sweep(lin, 4)));
  auto pend = PendulumSweepConfig::defaults();
  pend.grid = GridSpec{};
  pend.grid.values = {0.0, 0.05, 0.1, 0.2};
  EXPECT_EQ(csv_of(run_pendulum_sweep(pend, 1)), csv_of(run_pendulum_sweep(pend, 3)));
}

TEST(Determinism, BoundSuiteIndependentOfJobCount) {
  BoundSuiteConfig cfg;
  cfg.systems = 30;
  cfg.lemma_trials = 50;
  std::ostringstream a, b;
  write_bound_summary_csv(a, run_bound_suite(cfg, 1));
  write_bound_summary_csv(b, run_bound_suite(cfg, 4));
  EXPECT_EQ(a.str(), b.str());
}

TEST(BoundSuite, SelfTestDetectsHalvedBounds) {
  BoundSuiteConfig cfg;
  cfg.systems = 30;
  cfg.lemma_trials = 100;
  EXPECT_EQ(run_bound_suite(cfg).total_violations(), 0);
  cfg.rhs_scale = 0.5;
  EXPECT_GT(run_bound_suite(cfg).total_violations(), 0);
}

TEST(Svg, ProducesDocument) {
  std::ostringstream os;
  write_sweep_svg(os, run_linear_sweep(LinearSweepConfig::defaults()), "t", "eps", true);
  EXPECT_EQ(os.str().rfind("<svg", 0), 0u);
  EXPECT_NE(os.str().find("</svg>"), std::string::npos);
}

TEST(Cli, WritesOutputsAndExitsZero) {
  const auto dir = scratch_dir("ok");
  EXPECT_EQ(run_cli("linear-sweep --out " + dir.string() + " --plot"), 0);
  EXPECT_TRUE(fs::exists(dir / "linear_sweep.csv"));
  EXPECT_TRUE(fs::exists(dir / "linear_sweep.svg"));
  EXPECT_EQ(slurp(dir / "linear_sweep.csv"), csv_of(run_linear_sweep(LinearSweepConfig::defaults())));
}

TEST(Cli, BadConfigExitsOne) {
  const auto dir = scratch_dir("badcfg");
  std::ofstream(dir / "bad.ini") << "[linear]\nnot_a_key = 1\n";
  EXPECT_EQ(run_cli("linear-sweep --config " + (dir / "bad.ini").string() + " --out " + dir.string()), 1);
  std::ofstream(dir / "cap.ini") << "[grid]\nvalues = 0.1, 10\n";
  EXPECT_EQ(run_cli("linear-sweep --config " + (dir / "cap.ini").string() + " --out " + dir.string()), 1);
  EXPECT_EQ(run_cli("no-such-command"), 1);
}

TEST(Cli, UnwritableOutputExitsThree) {
  // A directory below a regular file cannot be created, even by root.
  const auto dir = scratch_dir("unwritable");
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(run_cli("linear-sweep --out " + (dir / "file" / "sub").string()), 3);
  EXPECT_EQ(run_cli("linear-sweep --config /nonexistent/file.ini"), 3);
}

TEST(Cli, VerifyBoundsSelfTest) {
  const auto dir = scratch_dir("bounds");
  std::ofstream(dir / "small.ini") << "[bounds]\nsystems = 20\nlemma_trials = 50\n";
  const std::string common = " --config " + (dir / "small.ini").string() + " --out " + dir.string();
  EXPECT_EQ(run_cli("verify-bounds" + common), 0);
  EXPECT_TRUE(fs::exists(dir / "bound_summary.csv"));
  EXPECT_EQ(run_cli("verify-bounds --self-test" + common), 0);
}
