#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "frbs/harness.hpp"

namespace frbs {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& name) : path_(fs::temp_directory_path() / name) {
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the given zero-based CSV columns from every line.
std::string drop_columns(const std::string& csv, std::vector<int> cols) {
  std::stringstream in(csv), out;
  for (std::string line; std::getline(in, line);) {
    std::stringstream ls(line);
    int i = 0;
    for (std::string cell; std::getline(ls, cell, ','); ++i) {
      if (std::find(cols.begin(), cols.end(), i) == cols.end()) out << cell << ';';
    }
    out << '\n';
  }
  return out.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "frbs");
  std::ostringstream out, err;
  const int code = cli(args, out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

TEST(SpecFile, ParsesGlobalsAndEntries) {
  std::istringstream in(R"(
# ell-2 comparison
name = demo
problem = l2
case = IIb
tol = 1e-8
max_iter = 400

[fast]
algorithm = frab_inertial
r_bar = 0.15
theta = 0.04
sigma = rational(0.005, 3, 25000)
c = inverse_square(10, 77)
delta0 = 1/101

[baseline]
algorithm = frbsm
lambda = ratio(1, 1, 100, 101)
)");
  const ExperimentSpec spec = parse_spec(in, "demo.spec");
  EXPECT_EQ(spec.name, "demo");
  EXPECT_EQ(spec.problem.kind, ProblemKind::kL2);
  EXPECT_EQ(spec.problem.initials, "IIb");
  EXPECT_EQ(spec.max_iter, 400);
  ASSERT_EQ(spec.entries.size(), 2u);
  EXPECT_EQ(spec.entries[0].name, "fast");
  EXPECT_EQ(spec.entries[0].config.algorithm, Algorithm::kFrabInertial);
  EXPECT_DOUBLE_EQ(spec.entries[0].config.theta_bar, 0.04);
  EXPECT_DOUBLE_EQ(spec.entries[0].config.delta0, 1.0 / 101.0);
  EXPECT_EQ(spec.entries[1].config.algorithm, Algorithm::kFrbsmBaseline);
  EXPECT_TRUE(validate(spec).ok()) << validate(spec).summary();
}

TEST(SpecFile, ErrorsCarryTheLine) {
  std::istringstream in("problem = r3\n[a]\nalgorithm = frab_adaptive\nr_bar = abc\n");
  try {
    parse_spec(in, "x.spec");
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("x.spec:4"), std::string::npos) << e.what();
  }
  std::istringstream unknown("problem = r3\nbogus_key = 1\n");
  EXPECT_THROW(parse_spec(unknown), UsageError);
  std::istringstream bad_problem("problem = torus\n");
  EXPECT_THROW(parse_spec(bad_problem), UsageError);
}

TEST(SpecFile, AnchorsAndContractions) {
  EXPECT_EQ(resolve_vector("constant(2)", 3), make_vector({2, 2, 2}));
  EXPECT_EQ(resolve_vector("1, 0, -1", 3), make_vector({1, 0, -1}));
  EXPECT_DOUBLE_EQ(resolve_vector("geometric(1.5, -0.5)", 4)[3], -0.1875);
  EXPECT_THROW(resolve_vector("1, 2", 3), UsageError);
  const auto u = resolve_contraction("scale(0.4)");
  ASSERT_TRUE(u);
  EXPECT_DOUBLE_EQ(u->kappa, 0.4);
  EXPECT_EQ(u->map(make_vector({5}))[0], 2.0);
  EXPECT_FALSE(resolve_contraction(""));
  EXPECT_THROW(resolve_contraction("spin(2)"), UsageError);
}

TEST(Builtins, AllValidate) {
  const auto names = builtin_names();
  EXPECT_GE(names.size(), 8u);
  for (const auto& name : names) {
    const auto spec = builtin_experiment(name);
    ASSERT_TRUE(spec) << name;
    EXPECT_TRUE(validate(*spec).ok()) << name << ": " << validate(*spec).summary();
  }
  EXPECT_FALSE(builtin_experiment("nope"));
}

TEST(RunExperiment, EmptyEntryListGivesEmptyReport) {
  ExperimentSpec spec = *builtin_experiment("ae1-case-ia");
  spec.entries.clear();
  EXPECT_TRUE(run_experiment(spec).rows.empty());
}

TEST(RunExperiment, CsvSchemasAndDeterminism) {
  TempDir a("frbs_harness_a"), b("frbs_harness_b");
  ExperimentSpec spec = *builtin_experiment("ae1-case-ia");
  spec.output_dir = a.path();
  const ComparisonReport report = run_experiment(spec);
  spec.output_dir = b.path();
  run_experiment(spec);

  ASSERT_EQ(report.rows.size(), 4u);
  const std::string summary = slurp(a.path() / "summary.csv");
  EXPECT_EQ(summary.substr(0, summary.find('\n')), "algorithm,iterations,final_tol,final_dist,wall_s,snr");
  EXPECT_EQ(drop_columns(summary, {4}), drop_columns(slurp(b.path() / "summary.csv"), {4}));

  for (const auto& row : report.rows) {
    const std::string trace = slurp(a.path() / (row.algorithm + "_trace.csv"));
    EXPECT_EQ(trace.substr(0, trace.find('\n')), "n,tol,delta,dist,elapsed_s");
    const auto lines = std::count(trace.begin(), trace.end(), '\n');
    EXPECT_EQ(lines - 1, row.iterations);
    EXPECT_EQ(static_cast<std::int64_t>(row.record.residuals.size()), row.iterations);
    EXPECT_EQ(drop_columns(trace, {4}), drop_columns(slurp(b.path() / (row.algorithm + "_trace.csv")), {4}));
  }
}

TEST(RunExperiment, NumericalFailureDoesNotStopSiblings) {
  ExperimentSpec spec = *builtin_experiment("ae1-case-ia");
  // A huge reflected step makes RFBSM blow up on this affine operator.
  spec.entries[3].config.gamma = 1e6;
  spec.max_iter = 400;
  const ComparisonReport report = run_experiment(spec);
  EXPECT_TRUE(report.any_numerical_failure());
  EXPECT_EQ(report.rows[3].terminated_by, Termination::kNumericalFailure);
  EXPECT_EQ(report.rows[0].terminated_by, Termination::kTolerance);
}

TEST(ControlTables, ShapeFeasibilityAndSwitch) {
  TempDir dir("frbs_control_tables");
  const ControlProblem cp = double_integrator_problem(100);
  RunRecord rec;
  rec.final_iterate = Vector::Zero(100);
  emit_control_tables(rec, cp, dir.path(), "zero");
  const std::string control = slurp(dir.path() / "zero_control.csv");
  EXPECT_EQ(std::count(control.begin(), control.end(), '\n'), 101);
  const std::string state = slurp(dir.path() / "zero_state.csv");
  EXPECT_EQ(std::count(state.begin(), state.end(), '\n'), 102);

  rec.final_iterate = Vector::Zero(7);
  EXPECT_THROW(emit_control_tables(rec, cp, dir.path()), UsageError);

  const ExperimentSpec spec = *builtin_experiment("control-bang-bang");
  const BuiltProblem built = build_problem(spec.problem);
  SolverConfig cfg = effective_config(spec, spec.entries[0], built.problem);
  const RunRecord solved = run(built.problem, cfg);
  EXPECT_LE(solved.final_iterate.cwiseAbs().maxCoeff(), 1.0);
  const auto t = estimate_switch_time(cp, solved.final_iterate);
  ASSERT_TRUE(t);
  EXPECT_GE(*t, 1.1);
  EXPECT_LE(*t, 1.3);
}

TEST(Cli, List) {
  std::string out;
  EXPECT_EQ(run_cli({"list"}, &out), 0);
  EXPECT_NE(out.find("ae1-case-ia"), std::string::npos);
  EXPECT_NE(out.find("deblur-synthetic"), std::string::npos);
}

TEST(Cli, RunBuiltinWritesCsv) {
  TempDir dir("frbs_cli_run");
  std::string out;
  EXPECT_EQ(run_cli({"run", "ae1-case-ia", "--tol", "1e-10", "--out", dir.path().string()}, &out), 0);
  EXPECT_NE(out.find("anchored"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path() / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir.path() / "rfbsm_trace.csv"));
}

TEST(Cli, AlgoFilterAndTrace) {
  std::string out;
  EXPECT_EQ(run_cli({"run", "ae1-case-ib", "--algo", "rfbsm", "--max-iter", "5", "--trace"}, &out), 0);
  EXPECT_EQ(out.find("anchored "), std::string::npos);
  EXPECT_NE(out.find("rfbsm 5 "), std::string::npos);
  EXPECT_EQ(run_cli({"run", "ae1-case-ib", "--algo", "nothing"}), 1);
}

TEST(Cli, ValidateRejectsOutOfRangeStepRatio) {
  TempDir dir("frbs_cli_validate");
  {
    std::ofstream spec(dir.path() / "bad.spec");
    spec << "problem = r3\n[alg]\nalgorithm = frab_adaptive\nr_bar = 0.35\nbeta_bar = 0.2\n";
  }
  std::string err;
  EXPECT_EQ(run_cli({"validate", (dir.path() / "bad.spec").string()}, nullptr, &err), 1);
  EXPECT_NE(err.find("r_bar"), std::string::npos) << err;

  {
    std::ofstream spec(dir.path() / "good.spec");
    spec << "problem = r3\n[alg]\nalgorithm = frab_adaptive\n";
  }
  EXPECT_EQ(run_cli({"validate", (dir.path() / "good.spec").string()}), 0);
}

TEST(Cli, ConfigErrorsExitOne) {
  EXPECT_EQ(run_cli({"run", "no-such-experiment"}), 1);
  EXPECT_EQ(run_cli({"frobnicate"}), 1);
  EXPECT_EQ(run_cli({}), 1);
}

TEST(Cli, NumericalFailureExitsTwo) {
  TempDir dir("frbs_cli_failure");
  {
    std::ofstream spec(dir.path() / "blowup.spec");
    spec << "problem = r3\nmax_iter = 400\n[r]\nalgorithm = rfbsm\ngamma = 1e6\n";
  }
  EXPECT_EQ(run_cli({"run", (dir.path() / "blowup.spec").string()}), 2);
}

}  // namespace
}  // namespace frbs
