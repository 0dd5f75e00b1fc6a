#include "frbs/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <map>

#include <CLI11.hpp>

#include "frbs/image_io.hpp"

namespace frbs {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

R3Case r3_case(const std::string& s) {
  if (s == "Ia" || s == "ia") return R3Case::kIa;
  if (s == "Ib" || s == "ib") return R3Case::kIb;
  throw UsageError("r3 case must be Ia or Ib, got '" + s + "'");
}

L2Case l2_case(const std::string& s) {
  if (s == "IIa" || s == "iia") return L2Case::kIIa;
  if (s == "IIb" || s == "iib") return L2Case::kIIb;
  if (s == "IIc" || s == "iic") return L2Case::kIIc;
  if (s == "IId" || s == "iid") return L2Case::kIId;
  throw UsageError("l2 case must be one of IIa..IId, got '" + s + "'");
}

Vector load_image(const ProblemSelector& sel, Eigen::Index& rows, Eigen::Index& cols) {
  const std::filesystem::path path(sel.image_path);
  Eigen::MatrixXd pixels;
  if (path.extension() == ".pgm") {
    pixels = read_pgm(path).pixels;
  } else {
    pixels = read_csv_matrix(path);
  }
  rows = pixels.rows();
  cols = pixels.cols();
  Vector img(rows * cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) img[i * cols + j] = pixels(i, j);
  }
  return img;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kR3:
      return "r3";
    case ProblemKind::kL2:
      return "l2";
    case ProblemKind::kControl:
      return "control";
    case ProblemKind::kDeblur:
      return "deblur";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  for (auto k : {ProblemKind::kR3, ProblemKind::kL2, ProblemKind::kControl, ProblemKind::kDeblur}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

BuiltProblem build_problem(const ProblemSelector& sel) {
  BuiltProblem out;
  switch (sel.kind) {
    case ProblemKind::kR3:
      out.problem = make_r3_problem(r3_case(sel.initials));
      break;
    case ProblemKind::kL2:
      out.problem = make_l2_problem(sel.trunc_dim, l2_case(sel.initials));
      break;
    case ProblemKind::kControl: {
      ControlProblem cp = double_integrator_problem(sel.mesh);
      cp.weighted_residual = sel.weighted_residual;
      out.problem = make_control_problem(cp, sel.seed);
      out.control = std::move(cp);
      break;
    }
    case ProblemKind::kDeblur: {
      Eigen::Index rows = sel.image_rows, cols = sel.image_cols;
      const Vector truth = sel.image_path.empty() ? synthetic_image(rows, cols) : load_image(sel, rows, cols);
      const BlurModel model = gaussian_blur(rows, cols, sel.kernel_size, sel.blur_stddev, sel.boundary);
      const Vector observed = add_gaussian_noise(apply_blur(model, truth), sel.noise_stddev, sel.seed);
      out.problem = make_deblur_problem(model, observed, sel.reg);
      out.problem.reference = truth;
      break;
    }
  }
  return out;
}

SolverConfig effective_config(const ExperimentSpec& spec, const AlgorithmEntry& entry, const Problem& problem) {
  SolverConfig cfg = entry.config;
  cfg.tol = spec.tol;
  cfg.max_iter = spec.max_iter;
  cfg.stop_rule = spec.stop_rule;
  if (!entry.anchor_spec.empty()) {
    cfg.anchor = resolve_vector(entry.anchor_spec, problem.dim);
  } else if (cfg.anchor.size() == 0 && problem.default_anchor) {
    cfg.anchor = *problem.default_anchor;
  }
  if (!entry.contraction_spec.empty()) {
    auto u = resolve_contraction(entry.contraction_spec);
    if (u && !u->map) {
      const Vector anchor = cfg.anchor.size() ? cfg.anchor : Vector::Zero(problem.dim);
      u->map = [anchor](const Vector&) { return anchor; };
    }
    cfg.contraction = std::move(u);
  }
  return cfg;
}

ValidationReport validate(const ExperimentSpec& spec) {
  ValidationReport report;
  std::optional<BuiltProblem> built;
  try {
    built = build_problem(spec.problem);
  } catch (const UsageError& e) {
    report.violations.push_back(std::string("problem: ") + e.what());
    return report;
  }
  for (const auto& entry : spec.entries) {
    try {
      const SolverConfig cfg = effective_config(spec, entry, built->problem);
      for (const auto& v : validate(cfg, built->problem.T.lipschitz()).violations) {
        report.violations.push_back(entry.name + ": " + v);
      }
      if (cfg.stop_rule == StopRule::kDistance && !built->problem.known_solution) {
        report.violations.push_back(entry.name + ": distance stop rule needs a known solution");
      }
    } catch (const UsageError& e) {
      report.violations.push_back(entry.name + ": " + e.what());
    }
  }
  return report;
}

bool ComparisonReport::any_numerical_failure() const {
  for (const auto& r : rows) {
    if (r.terminated_by == Termination::kNumericalFailure) return true;
  }
  return false;
}

ComparisonReport run_experiment(const ExperimentSpec& spec, std::ostream* trace_out) {
  if (auto report = validate(spec); !report.ok()) throw UsageError(report.summary());

  const BuiltProblem built = build_problem(spec.problem);
  const Problem& problem = built.problem;

  ComparisonReport report;
  report.experiment = spec.name;
  for (const auto& entry : spec.entries) {
    const SolverConfig cfg = effective_config(spec, entry, problem);
    ReportRow row;
    row.algorithm = entry.name;
    try {
      row.record = run(problem, cfg);
    } catch (const NumericalFailure& e) {
      row.record.terminated_by = Termination::kNumericalFailure;
      row.record.failure_message = e.what();
    }
    const RunRecord& rec = row.record;
    row.iterations = rec.iterations;
    row.final_tol = rec.residuals.empty() ? std::nan("") : rec.residuals.back();
    if (!rec.distances.empty()) row.final_dist = rec.distances.back();
    row.wall_s = rec.wall_time;
    row.terminated_by = rec.terminated_by;
    row.failure = rec.failure_message;
    if (problem.reference && rec.final_iterate.size() == problem.reference->size()) {
      row.snr = snr(*problem.reference, rec.final_iterate);
    }
    if (trace_out) {
      for (std::size_t i = 0; i < rec.residuals.size(); ++i) {
        *trace_out << entry.name << ' ' << (i + 1) << ' ' << fmt17(rec.residuals[i]) << '\n';
      }
    }
    report.rows.push_back(std::move(row));
  }

  if (spec.output_dir) {
    std::filesystem::create_directories(*spec.output_dir);
    for (const auto& row : report.rows) {
      write_trace_csv(*spec.output_dir / (row.algorithm + "_trace.csv"), row.record);
      if (built.control && row.record.final_iterate.size() == problem.dim) {
        emit_control_tables(row.record, *built.control, *spec.output_dir, row.algorithm);
      }
    }
    write_summary_csv(*spec.output_dir / "summary.csv", report);
  }
  return report;
}

void write_trace_csv(const std::filesystem::path& path, const RunRecord& record) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << "n,tol,delta,dist,elapsed_s\n";
  for (std::size_t i = 0; i < record.residuals.size(); ++i) {
    out << (i + 1) << ',' << fmt17(record.residuals[i]) << ',' << fmt17(record.deltas[i]) << ',';
    if (i < record.distances.size()) out << fmt17(record.distances[i]);
    out << ',' << fmt17(record.elapsed[i]) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const ComparisonReport& report) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path.string());
  out << "algorithm,iterations,final_tol,final_dist,wall_s,snr\n";
  for (const auto& r : report.rows) {
    out << r.algorithm << ',' << r.iterations << ',' << fmt17(r.final_tol) << ',';
    if (r.final_dist) out << fmt17(*r.final_dist);
    out << ',' << fmt17(r.wall_s) << ',';
    if (r.snr) out << fmt17(*r.snr);
    out << '\n';
  }
}

void print_report(std::ostream& out, const ComparisonReport& report) {
  out << "experiment: " << report.experiment << '\n';
  out << "algorithm               iters      final_tol     final_dist       wall_s        snr  status\n";
  for (const auto& r : report.rows) {
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %8lld %14s %14s %12s %10s  %s", r.algorithm.c_str(),
                  static_cast<long long>(r.iterations), fmt_short(r.final_tol).c_str(),
                  r.final_dist ? fmt_short(*r.final_dist).c_str() : "-", fmt_short(r.wall_s).c_str(),
                  r.snr ? fmt_short(*r.snr).c_str() : "-", std::string(to_string(r.terminated_by)).c_str());
    out << line;
    if (!r.failure.empty()) out << " (" << r.failure << ')';
    out << '\n';
  }
}

void emit_control_tables(const RunRecord& record, const ControlProblem& problem, const std::filesystem::path& dir,
                         const std::string& prefix) {
  const auto l = problem.control_channels();
  const Vector& z = record.final_iterate;
  if (z.size() != problem.mesh * l) throw UsageError("emit_control_tables: control has the wrong dimension");
  std::filesystem::create_directories(dir);
  const double h = problem.h();

  std::ofstream control(dir / (prefix + "_control.csv"));
  if (!control) throw UsageError("cannot write control table in " + dir.string());
  control << 't';
  for (Eigen::Index c = 0; c < l; ++c) control << ",z" << (c + 1);
  control << '\n';
  for (int j = 0; j < problem.mesh; ++j) {
    control << fmt17(j * h);
    for (Eigen::Index c = 0; c < l; ++c) control << ',' << fmt17(z[j * l + c]);
    control << '\n';
  }

  const Eigen::MatrixXd x = simulate_state(problem, z);
  std::ofstream state(dir / (prefix + "_state.csv"));
  if (!state) throw UsageError("cannot write state table in " + dir.string());
  state << 't';
  for (Eigen::Index c = 0; c < x.cols(); ++c) state << ",x" << (c + 1);
  state << '\n';
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    state << fmt17(j * h);
    for (Eigen::Index c = 0; c < x.cols(); ++c) state << ',' << fmt17(x(j, c));
    state << '\n';
  }
}

std::optional<double> estimate_switch_time(const ControlProblem& problem, const Vector& z) {
  const auto l = problem.control_channels();
  for (int j = 1; j < problem.mesh; ++j) {
    const double a = z[(j - 1) * l], b = z[j * l];
    if ((a > 0.0 && b <= 0.0) || (a < 0.0 && b >= 0.0)) return j * problem.h();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Builtin experiments

namespace {

AlgorithmEntry entry(std::string name, Algorithm a) {
  AlgorithmEntry e;
  e.name = std::move(name);
  e.config.algorithm = a;
  return e;
}

// Parameters shared by the R^3 and control experiments.
void ocp_parameters(SolverConfig& c) {
  c.delta0 = 0.1;
  c.delta1 = 0.3;
  c.r_bar = 0.3;
  c.beta_bar = 0.1;
  c.sigma = SequenceSpec(Rational{0.005, 3.0, 25000.0});
  c.c = SequenceSpec(InverseQuadratic{1.0, 0.0, 1.0});
  c.theta_bar = 0.04;
  c.lambda = SequenceSpec(Ratio{1.0, 1.0, 15.0, 10.0});
  c.gamma = 0.075;
}

std::vector<AlgorithmEntry> four_way(void (*params)(SolverConfig&)) {
  std::vector<AlgorithmEntry> out;
  for (auto [name, a] : {std::pair{"anchored", Algorithm::kFrabAdaptive}, std::pair{"inertial", Algorithm::kFrabInertial},
                         std::pair{"frbsm", Algorithm::kFrbsmBaseline}, std::pair{"rfbsm", Algorithm::kRfbsmBaseline}}) {
    auto e = entry(name, a);
    params(e.config);
    out.push_back(std::move(e));
  }
  return out;
}

void l2_parameters(SolverConfig& c) {
  c.delta0 = 1.0 / 101.0;
  c.delta1 = 2.0 / 201.0;
  c.r_bar = 0.15;
  c.beta_bar = 0.1;
  c.sigma = SequenceSpec(Rational{0.005, 3.0, 25000.0});
  c.c = SequenceSpec(InverseSquare{10.0, 77.0});
  c.theta_bar = 0.04;
  c.lambda = SequenceSpec(Ratio{1.0, 1.0, 100.0, 101.0});
  c.gamma = 2.0 / 201.0;
}

void deblur_parameters(SolverConfig& c) {
  c.delta0 = 0.01;
  c.delta1 = 0.3;
  c.r_bar = 0.3;
  c.beta_bar = 0.1;
  c.sigma = SequenceSpec(Rational{1.0, 1.0, 250.0});
  c.c = SequenceSpec(InverseSquare{1.0, 100.0});
  c.theta_bar = 0.0000005;
  c.lambda = SequenceSpec(Ratio{2.0, 1.0, 111.0, 100.0});
  c.gamma = 0.01;
}

ExperimentSpec ae1(const std::string& name, const std::string& initials) {
  ExperimentSpec s;
  s.name = name;
  s.problem.kind = ProblemKind::kR3;
  s.problem.initials = initials;
  s.entries = four_way(ocp_parameters);
  s.tol = 1e-10;
  s.max_iter = 1000;
  s.stop_rule = StopRule::kDistance;
  return s;
}

ExperimentSpec ex2(const std::string& name, const std::string& initials) {
  ExperimentSpec s;
  s.name = name;
  s.problem.kind = ProblemKind::kL2;
  s.problem.initials = initials;
  s.entries = four_way(l2_parameters);
  s.tol = 1e-8;
  s.max_iter = 5000;
  return s;
}

ExperimentSpec ocp() {
  ExperimentSpec s;
  s.name = "control-bang-bang";
  s.problem.kind = ProblemKind::kControl;
  s.entries = four_way(ocp_parameters);
  s.tol = 1e-4;
  s.max_iter = 20000;
  return s;
}

ExperimentSpec deblur() {
  ExperimentSpec s;
  s.name = "deblur-synthetic";
  s.problem.kind = ProblemKind::kDeblur;
  s.entries = four_way(deblur_parameters);
  // Fixed budget: the tolerance is never reached.
  s.tol = 1e-300;
  s.max_iter = 500;
  return s;
}

ExperimentSpec all_variants() {
  ExperimentSpec s = ae1("ae1-all-variants", "Ia");
  s.stop_rule = StopRule::kResidual;
  auto add = [&](const char* name, Algorithm a, auto&& tweak) {
    auto e = entry(name, a);
    ocp_parameters(e.config);
    tweak(e);
    s.entries.push_back(std::move(e));
  };
  add("fixed", Algorithm::kFrabFixed, [](AlgorithmEntry& e) { e.config.fixed_delta = 0.2; });
  add("inertial_variable", Algorithm::kFrabInertialVariable,
      [](AlgorithmEntry& e) { e.config.theta_seq = SequenceSpec(Ratio{0.04, 0.0, 1.0, 1.0}); });
  add("viscosity", Algorithm::kViscosity, [](AlgorithmEntry& e) { e.contraction_spec = "scale(0.4)"; });
  add("inertial_viscosity", Algorithm::kInertialViscosity, [](AlgorithmEntry& e) { e.contraction_spec = "scale(0.4)"; });
  return s;
}

const std::map<std::string, ExperimentSpec (*)()>& builtins() {
  static const std::map<std::string, ExperimentSpec (*)()> table{
      {"ae1-case-ia", [] { return ae1("ae1-case-ia", "Ia"); }},
      {"ae1-case-ib", [] { return ae1("ae1-case-ib", "Ib"); }},
      {"ae1-all-variants", all_variants},
      {"ex2-case-iia", [] { return ex2("ex2-case-iia", "IIa"); }},
      {"ex2-case-iib", [] { return ex2("ex2-case-iib", "IIb"); }},
      {"ex2-case-iic", [] { return ex2("ex2-case-iic", "IIc"); }},
      {"ex2-case-iid", [] { return ex2("ex2-case-iid", "IId"); }},
      {"control-bang-bang", ocp},
      {"deblur-synthetic", deblur},
  };
  return table;
}

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : builtins()) out.push_back(name);
  return out;
}

std::optional<ExperimentSpec> builtin_experiment(const std::string& name) {
  const auto& table = builtins();
  auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second();
}

// ---------------------------------------------------------------------------
// CLI

namespace {

ExperimentSpec resolve_spec(const std::string& target) {
  if (auto b = builtin_experiment(target)) return *b;
  if (std::filesystem::exists(target)) return load_spec(target);
  throw UsageError("'" + target + "' is neither a builtin experiment nor a readable spec file");
}

}  // namespace

int cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Forward-reflected-backward splitting solvers and experiments", "frbs"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list", "Print the builtin experiment names");

  auto* run_cmd = app.add_subcommand("run", "Run a builtin experiment or a spec file");
  std::string target;
  std::optional<std::int64_t> max_iter;
  std::optional<double> tol;
  std::vector<std::string> algo_filter;
  std::string out_dir;
  bool trace = false;
  run_cmd->add_option("target", target, "Builtin name or spec file")->required();
  run_cmd->add_option("--max-iter", max_iter, "Override the iteration budget");
  run_cmd->add_option("--tol", tol, "Override the stopping tolerance");
  run_cmd->add_option("--algo", algo_filter, "Only run the named entries (repeatable)");
  run_cmd->add_option("--out", out_dir, "Directory for trace and summary CSVs");
  run_cmd->add_flag("--trace", trace, "Print Tol_n for every iteration");

  auto* validate_cmd = app.add_subcommand("validate", "Check a spec file without running it");
  std::string validate_target;
  validate_cmd->add_option("spec", validate_target, "Spec file or builtin name")->required();

  // args[0] is the program name; CLI11 takes the rest in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*list) {
      for (const auto& name : builtin_names()) out << name << '\n';
      return 0;
    }

    if (*validate_cmd) {
      const ExperimentSpec spec = resolve_spec(validate_target);
      const auto report = validate(spec);
      if (!report.ok()) {
        for (const auto& v : report.violations) err << "invalid: " << v << '\n';
        return 1;
      }
      out << spec.name << ": ok (" << spec.entries.size() << " algorithm entries)\n";
      return 0;
    }

    ExperimentSpec spec = resolve_spec(target);
    if (max_iter) spec.max_iter = *max_iter;
    if (tol) spec.tol = *tol;
    if (!out_dir.empty()) spec.output_dir = out_dir;
    spec.trace = spec.trace || trace;
    if (!algo_filter.empty()) {
      std::vector<AlgorithmEntry> kept;
      for (auto& e : spec.entries) {
        if (std::find(algo_filter.begin(), algo_filter.end(), e.name) != algo_filter.end()) kept.push_back(e);
      }
      if (kept.empty()) {
        err << "error: --algo matched no entries\n";
        return 1;
      }
      spec.entries = std::move(kept);
    }

    const ComparisonReport report = run_experiment(spec, spec.trace ? &out : nullptr);
    print_report(out, report);
    return report.any_numerical_failure() ? 2 : 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace frbs
