#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "frbs/problems.hpp"
#include "frbs/solvers.hpp"

namespace frbs {

enum class ProblemKind { kR3, kL2, kControl, kDeblur };

std::string_view to_string(ProblemKind kind);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

struct ProblemSelector {
  ProblemKind kind = ProblemKind::kR3;
  /// "Ia"/"Ib" for r3, "IIa".."IId" for l2.
  std::string initials = "Ia";
  Eigen::Index trunc_dim = kDefaultTruncDim;

  int mesh = 100;
  bool weighted_residual = false;
  std::uint64_t seed = 2021;

  Eigen::Index image_rows = 32;
  Eigen::Index image_cols = 32;
  /// Optional PGM/CSV ground-truth image replacing the synthetic one.
  std::string image_path;
  int kernel_size = 9;
  double blur_stddev = 4.0;
  Boundary boundary = Boundary::kZeroPad;
  double reg = 1.0;
  double noise_stddev = 0.0;
};

struct BuiltProblem {
  Problem problem;
  std::optional<ControlProblem> control;
};

BuiltProblem build_problem(const ProblemSelector& selector);

struct AlgorithmEntry {
  std::string name;
  SolverConfig config;
  /// Resolved against the problem dimension at run time: "" (problem
  /// default), "1, 2, 3", "constant(2)" or "geometric(1.5, -0.5)".
  std::string anchor_spec;
  /// "" (none), "anchor" (U w = v-hat) or "scale(k)" (U w = k w).
  std::string contraction_spec;
};

struct ExperimentSpec {
  std::string name;
  ProblemSelector problem;
  std::vector<AlgorithmEntry> entries;

  // Stopping rule shared by every entry.
  double tol = 1e-8;
  std::int64_t max_iter = 1000;
  StopRule stop_rule = StopRule::kResidual;

  std::optional<std::filesystem::path> output_dir;
  /// Print Tol_n for every iteration of every run.
  bool trace = false;
};

/// Builds a vector of dimension `dim` from an anchor spec string.
Vector resolve_vector(const std::string& text, Eigen::Index dim);
std::optional<Contraction> resolve_contraction(const std::string& text);

/// Applies the shared stopping rule and resolves anchor/contraction specs.
SolverConfig effective_config(const ExperimentSpec& spec, const AlgorithmEntry& entry, const Problem& problem);

/// Validates every entry against the built problem.
ValidationReport validate(const ExperimentSpec& spec);

struct ReportRow {
  std::string algorithm;
  std::int64_t iterations = 0;
  double final_tol = 0.0;
  std::optional<double> final_dist;
  double wall_s = 0.0;
  std::optional<double> snr;
  Termination terminated_by = Termination::kMaxIter;
  std::string failure;
  RunRecord record;
};

struct ComparisonReport {
  std::string experiment;
  std::vector<ReportRow> rows;

  bool any_numerical_failure() const;
};

/// Runs every entry; one entry's numerical failure never stops the others.
/// Writes `<name>_trace.csv` per entry plus `summary.csv` when the spec has
/// an output directory. Throws UsageError if validation fails.
ComparisonReport run_experiment(const ExperimentSpec& spec, std::ostream* trace_out = nullptr);

// CSV schemas: trace = n,tol,delta,dist,elapsed_s
//              summary = algorithm,iterations,final_tol,final_dist,wall_s,snr
void write_trace_csv(const std::filesystem::path& path, const RunRecord& record);
void write_summary_csv(const std::filesystem::path& path, const ComparisonReport& report);
void print_report(std::ostream& out, const ComparisonReport& report);

/// Writes `<prefix>_control.csv` (t, z per channel) and `<prefix>_state.csv`
/// (t, x per component) from the run's final control.
void emit_control_tables(const RunRecord& record, const ControlProblem& problem, const std::filesystem::path& dir,
                         const std::string& prefix = "control");

/// First mesh time where the first control channel changes sign; nullopt if never.
std::optional<double> estimate_switch_time(const ControlProblem& problem, const Vector& z);

std::vector<std::string> builtin_names();
std::optional<ExperimentSpec> builtin_experiment(const std::string& name);

/// Parses the key = value spec format (see README).
ExperimentSpec parse_spec(std::istream& in, const std::string& source = "<spec>");
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Command line entry point. Exit codes: 0 success, 1 configuration error,
/// 2 numerical failure in at least one run.
int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace frbs
