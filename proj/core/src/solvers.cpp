#include "frbs/solvers.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace frbs {

namespace {

constexpr std::array<std::pair<Algorithm, std::string_view>, 8> kAlgorithmNames{{
    {Algorithm::kFrabAdaptive, "frab_adaptive"},
    {Algorithm::kFrabFixed, "frab_fixed"},
    {Algorithm::kFrabInertial, "frab_inertial"},
    {Algorithm::kFrabInertialVariable, "frab_inertial_variable"},
    {Algorithm::kViscosity, "viscosity"},
    {Algorithm::kInertialViscosity, "inertial_viscosity"},
    {Algorithm::kFrbsmBaseline, "frbsm"},
    {Algorithm::kRfbsmBaseline, "rfbsm"},
}};

// Terms are only checked on a finite prefix of each sequence.
constexpr std::int64_t kSequenceCheckHorizon = 10000;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void require_finite(const Vector& v, const char* what, std::int64_t n) {
  if (!v.allFinite()) throw NumericalFailure(std::string(what) + " is not finite", n);
}

// Everything the six anchored/viscosity schemes share:
//   w+ = J_{d_n}( anchor_term + (1 - s)(w + theta (w - w_prev)) - d_n T w - d_{n-1} rho (T w - T w_prev) )
// where anchor_term = s * v-hat (or s * U w) and rho = 1 - s (or 1 - s(1 - 2 kappa)).
struct AnchoredStep {
  double sigma;
  const Vector* anchor_point;
  double theta;
  double rho;
  double delta_curr;
  double delta_prev;
};

Vector anchored_argument(const IterationState& s, const AnchoredStep& k) {
  return k.sigma * (*k.anchor_point) + (1.0 - k.sigma) * (s.w_curr + k.theta * (s.w_curr - s.w_prev)) -
         k.delta_curr * s.Tw_curr - k.delta_prev * k.rho * (s.Tw_curr - s.Tw_prev);
}

// Applies the resolvent, evaluates T once at the new point and shifts the
// state. The step-size state is left for the caller to advance.
IterationState advance(const IterationState& s, const Vector& arg, double delta, const MonotoneMap& T,
                       const ResolventOp& J) {
  const auto n = s.n();
  require_finite(arg, "resolvent argument", n);
  IterationState next;
  next.w_curr = J(arg, delta);
  require_finite(next.w_curr, "iterate", n);
  next.Tw_curr = T(next.w_curr);
  require_finite(next.Tw_curr, "operator value", n);
  next.w_prev = s.w_curr;
  next.Tw_prev = s.Tw_curr;
  next.Tw_valid = true;
  next.step = s.step;
  next.operator_evals = s.operator_evals + 1;
  next.resolvent_calls = s.resolvent_calls + 1;
  return next;
}

const Vector& anchor_of(const SolverConfig& cfg, const IterationState& s) {
  if (cfg.anchor.size() == 0) throw UsageError("anchored step: anchor v-hat not set");
  require_same_dim(cfg.anchor, s.w_curr, "anchor");
  return cfg.anchor;
}

const Contraction& contraction_of(const SolverConfig& cfg) {
  if (!cfg.contraction || !cfg.contraction->map) throw UsageError("viscosity step: contraction U not set");
  return *cfg.contraction;
}

double inertia_at(const SolverConfig& cfg, std::int64_t n) {
  if (cfg.theta_seq) return (*cfg.theta_seq)(n);
  return cfg.theta_bar;
}

IterationState adaptive_anchored(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                                 const ResolventOp& J, const AnchoredStep& k) {
  const auto n = s.n();
  IterationState next = advance(s, anchored_argument(s, k), k.delta_curr, T, J);
  next.step = update_step(s.step, cfg.r_bar, cfg.c(n), s.w_curr, next.w_curr, s.Tw_curr, next.Tw_curr);
  return next;
}

IterationState viscosity_impl(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                              const ResolventOp& J, double theta) {
  const auto& u = contraction_of(cfg);
  const double sigma = cfg.sigma(s.n());
  const Vector uw = u.map(s.w_curr);
  require_same_dim(uw, s.w_curr, "contraction");
  return adaptive_anchored(s, cfg, T, J,
                           {sigma, &uw, theta, 1.0 - sigma * (1.0 - 2.0 * u.kappa), s.step.delta_curr,
                            s.step.delta_prev});
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  for (const auto& [a, name] : kAlgorithmNames) {
    if (a == algorithm) return name;
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  for (const auto& [a, n] : kAlgorithmNames) {
    if (n == name) return a;
  }
  return std::nullopt;
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = [] {
    std::vector<Algorithm> out;
    for (const auto& [a, _] : kAlgorithmNames) out.push_back(a);
    return out;
  }();
  return all;
}

bool is_anchored_scheme(Algorithm algorithm) {
  return algorithm != Algorithm::kFrbsmBaseline && algorithm != Algorithm::kRfbsmBaseline;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::kTolerance:
      return "tolerance";
    case Termination::kMaxIter:
      return "max_iter";
    case Termination::kNumericalFailure:
      return "numerical_failure";
  }
  return "unknown";
}

ValidationReport validate(const SolverConfig& cfg, std::optional<double> lipschitz) {
  ValidationReport report;
  auto& v = report.violations;
  const auto horizon = std::min<std::int64_t>(std::max<std::int64_t>(cfg.max_iter, 1), kSequenceCheckHorizon);

  if (cfg.max_iter < 0) v.push_back("max_iter must be nonnegative");
  if (!(cfg.tol > 0.0)) v.push_back("tol must be positive");
  if (cfg.anchor.size() > 0 && !cfg.anchor.allFinite()) v.push_back("anchor has non-finite entries");

  const Algorithm a = cfg.algorithm;
  const bool inertial = a == Algorithm::kFrabInertial || a == Algorithm::kInertialViscosity ||
                        a == Algorithm::kFrabInertialVariable;
  const bool viscous = a == Algorithm::kViscosity || a == Algorithm::kInertialViscosity;

  if (is_anchored_scheme(a)) {
    for (std::int64_t n = 1; n <= horizon; ++n) {
      const double s = cfg.sigma(n);
      if (!(s > 0.0 && s < 1.0)) {
        v.push_back("sigma_" + std::to_string(n) + " = " + num(s) + " not in (0, 1)");
        break;
      }
    }
  }

  if (a == Algorithm::kFrabFixed) {
    if (!cfg.fixed_delta) {
      v.push_back("frab_fixed needs fixed_delta");
    } else if (!lipschitz) {
      v.push_back("frab_fixed needs the Lipschitz constant of T");
    } else {
      const double hi = 1.0 / (2.0 * *lipschitz);
      if (!(*cfg.fixed_delta > 0.0 && *cfg.fixed_delta < hi)) {
        v.push_back("fixed_delta = " + num(*cfg.fixed_delta) + " not in (0, 1/(2L)) = (0, " + num(hi) + ")");
      }
    }
  } else if (is_anchored_scheme(a)) {
    const double kappa = viscous && cfg.contraction ? cfg.contraction->kappa : 0.0;
    const double theta = inertial ? cfg.theta_bar : 0.0;
    auto base = validate_parameters(cfg.r_bar, cfg.beta_bar, theta, kappa);
    v.insert(v.end(), base.violations.begin(), base.violations.end());
    if (!(cfg.delta0 > 0.0) || !(cfg.delta1 > 0.0)) v.push_back("delta0 and delta1 must be positive");
    if (!cfg.c.summable()) v.push_back("c_n = " + cfg.c.to_string() + " is not a summable kind");
    for (std::int64_t n = 1; n <= horizon; ++n) {
      if (!(cfg.c(n) >= 0.0)) {
        v.push_back("c_" + std::to_string(n) + " is negative");
        break;
      }
    }
  }

  if (a == Algorithm::kFrabInertialVariable) {
    if (!cfg.theta_seq) {
      v.push_back("frab_inertial_variable needs theta_seq");
    } else {
      double prev = (*cfg.theta_seq)(1);
      if (!(prev >= 0.0)) v.push_back("theta_1 must be nonnegative");
      for (std::int64_t n = 1; n <= horizon; ++n) {
        const double t = (*cfg.theta_seq)(n);
        if (t < prev) {
          v.push_back("theta_n decreases at n = " + std::to_string(n));
          break;
        }
        if (t > cfg.theta_bar) {
          v.push_back("theta_" + std::to_string(n) + " = " + num(t) + " exceeds theta_bar = " + num(cfg.theta_bar));
          break;
        }
        prev = t;
      }
    }
  }

  if (viscous && (!cfg.contraction || !cfg.contraction->map)) v.push_back(std::string(to_string(a)) + " needs a contraction U");

  if (a == Algorithm::kFrbsmBaseline) {
    if (!(cfg.delta0 > 0.0)) v.push_back("frbsm uses delta0 as lambda_0; must be positive");
    for (std::int64_t n = 1; n <= horizon; ++n) {
      if (!(cfg.lambda(n) > 0.0)) {
        v.push_back("lambda_" + std::to_string(n) + " must be positive");
        break;
      }
    }
  }
  if (a == Algorithm::kRfbsmBaseline && !(cfg.gamma > 0.0)) v.push_back("gamma must be positive");

  return report;
}

IterationState initial_state(const SolverConfig& cfg, const MonotoneMap& T, const Vector& w0, const Vector& w1) {
  require_same_dim(w0, w1, "initial_state");
  if (!w0.allFinite() || !w1.allFinite()) throw UsageError("initial_state: initial points must be finite");

  IterationState s;
  s.w_prev = w0;
  s.w_curr = w1;
  s.step.n = 1;
  switch (cfg.algorithm) {
    case Algorithm::kFrabFixed:
      s.step.delta_prev = s.step.delta_curr = cfg.fixed_delta.value_or(0.0);
      break;
    case Algorithm::kFrbsmBaseline:
      s.step.delta_prev = cfg.delta0;
      s.step.delta_curr = cfg.lambda(1);
      break;
    case Algorithm::kRfbsmBaseline:
      s.step.delta_prev = s.step.delta_curr = cfg.gamma;
      break;
    default:
      s.step.delta_prev = cfg.delta0;
      s.step.delta_curr = cfg.delta1;
  }

  if (cfg.algorithm == Algorithm::kRfbsmBaseline) {
    s.Tw_valid = false;
    return s;
  }
  s.Tw_prev = T(w0);
  s.Tw_curr = T(w1);
  s.operator_evals = 2;
  return s;
}

IterationState frab_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                         const ResolventOp& J) {
  const double sigma = cfg.sigma(s.n());
  return adaptive_anchored(s, cfg, T, J,
                           {sigma, &anchor_of(cfg, s), 0.0, 1.0 - sigma, s.step.delta_curr, s.step.delta_prev});
}

IterationState frab_fixed_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                               const ResolventOp& J) {
  if (!cfg.fixed_delta) throw UsageError("frab_fixed_step: fixed_delta not set");
  if (!T.lipschitz()) throw UsageError("frab_fixed_step: T has no Lipschitz constant");
  const double d = *cfg.fixed_delta;
  const double sigma = cfg.sigma(s.n());
  IterationState next = advance(s, anchored_argument(s, {sigma, &anchor_of(cfg, s), 0.0, 1.0 - sigma, d, d}), d, T, J);
  next.step = StepSizeState{d, d, s.n() + 1};
  return next;
}

IterationState frab_inertial_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                                  const ResolventOp& J) {
  const double sigma = cfg.sigma(s.n());
  return adaptive_anchored(s, cfg, T, J,
                           {sigma, &anchor_of(cfg, s), inertia_at(cfg, s.n()), 1.0 - sigma, s.step.delta_curr,
                            s.step.delta_prev});
}

IterationState viscosity_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                              const ResolventOp& J) {
  return viscosity_impl(s, cfg, T, J, 0.0);
}

IterationState inertial_viscosity_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                                       const ResolventOp& J) {
  return viscosity_impl(s, cfg, T, J, inertia_at(cfg, s.n()));
}

IterationState frbsm_baseline_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                                   const ResolventOp& J) {
  const auto n = s.n();
  const double lam = cfg.lambda(n);
  const double lam_prev = n == 1 ? cfg.delta0 : cfg.lambda(n - 1);
  if (!(lam > 0.0) || !std::isfinite(lam)) throw NumericalFailure("lambda_n is not a positive number", n);
  const Vector arg = s.w_curr - lam * s.Tw_curr - lam_prev * (s.Tw_curr - s.Tw_prev);
  IterationState next = advance(s, arg, lam, T, J);
  next.step = StepSizeState{lam, cfg.lambda(n + 1), n + 1};
  return next;
}

IterationState rfbsm_baseline_step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T,
                                   const ResolventOp& J) {
  const auto n = s.n();
  const double g = cfg.gamma;
  const Vector reflected = 2.0 * s.w_curr - s.w_prev;
  const Vector T_reflected = T(reflected);
  const Vector arg = s.w_curr - g * T_reflected;
  require_finite(arg, "resolvent argument", n);

  IterationState next;
  next.w_curr = J(arg, g);
  require_finite(next.w_curr, "iterate", n);
  next.w_prev = s.w_curr;
  next.Tw_valid = false;
  next.step = StepSizeState{g, g, n + 1};
  next.operator_evals = s.operator_evals + 1;
  next.resolvent_calls = s.resolvent_calls + 1;
  return next;
}

IterationState step(const IterationState& s, const SolverConfig& cfg, const MonotoneMap& T, const ResolventOp& J) {
  switch (cfg.algorithm) {
    case Algorithm::kFrabAdaptive:
      return frab_step(s, cfg, T, J);
    case Algorithm::kFrabFixed:
      return frab_fixed_step(s, cfg, T, J);
    case Algorithm::kFrabInertial:
    case Algorithm::kFrabInertialVariable:
      return frab_inertial_step(s, cfg, T, J);
    case Algorithm::kViscosity:
      return viscosity_step(s, cfg, T, J);
    case Algorithm::kInertialViscosity:
      return inertial_viscosity_step(s, cfg, T, J);
    case Algorithm::kFrbsmBaseline:
      return frbsm_baseline_step(s, cfg, T, J);
    case Algorithm::kRfbsmBaseline:
      return rfbsm_baseline_step(s, cfg, T, J);
  }
  throw UsageError("step: unknown algorithm");
}

double current_step(const IterationState& s, const SolverConfig& cfg) {
  switch (cfg.algorithm) {
    case Algorithm::kFrabFixed:
      return cfg.fixed_delta.value_or(0.0);
    case Algorithm::kRfbsmBaseline:
      return cfg.gamma;
    case Algorithm::kFrbsmBaseline:
      return cfg.lambda(s.n());
    default:
      return s.step.delta_curr;
  }
}

double residual_from(const Vector& w, const Vector& Tw, const ResolventOp& J, double weight) {
  require_same_dim(w, Tw, "residual");
  const Vector gap = w - J(w - Tw, 1.0);
  return 0.5 * weight * gap.squaredNorm();
}

double residual(const Vector& w, const MonotoneMap& T, const ResolventOp& J, double weight) {
  return residual_from(w, T(w), J, weight);
}

RunRecord run(const Problem& problem, const SolverConfig& cfg_in) {
  SolverConfig cfg = cfg_in;
  if (cfg.anchor.size() == 0 && problem.default_anchor) cfg.anchor = *problem.default_anchor;
  if (cfg.anchor.size() == 0) cfg.anchor = Vector::Zero(problem.dim);

  if (auto report = validate(cfg, problem.T.lipschitz()); !report.ok()) {
    throw UsageError(std::string(to_string(cfg.algorithm)) + ": " + report.summary());
  }
  if (cfg.stop_rule == StopRule::kDistance && !problem.known_solution) {
    throw UsageError("distance stop rule needs a problem with a known solution");
  }

  const Vector& w0 = cfg.w0 ? *cfg.w0 : problem.w0;
  const Vector& w1 = cfg.w1 ? *cfg.w1 : problem.w1;
  if (w0.size() != problem.dim || w1.size() != problem.dim) {
    throw UsageError("run: initial points do not match the problem dimension");
  }

  RunRecord rec;
  rec.algorithm = cfg.algorithm;
  rec.final_iterate = w1;

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto seconds = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  IterationState s = initial_state(cfg, problem.T, w0, w1);
  const auto reserve = static_cast<std::size_t>(std::min<std::int64_t>(cfg.max_iter, 1 << 16));
  rec.residuals.reserve(reserve);
  rec.deltas.reserve(reserve);
  rec.elapsed.reserve(reserve);

  try {
    for (std::int64_t k = 1; k <= cfg.max_iter; ++k) {
      const double delta_used = current_step(s, cfg);
      s = step(s, cfg, problem.T, problem.J);

      double tol_value = 0.0;
      if (cfg.stop_rule == StopRule::kDistance) {
        tol_value = 0.5 * (s.w_curr - *problem.known_solution).squaredNorm();
      } else if (s.Tw_valid) {
        tol_value = residual_from(s.w_curr, s.Tw_curr, problem.J, problem.residual_weight);
      } else {
        tol_value = residual(s.w_curr, problem.T, problem.J, problem.residual_weight);
        ++rec.monitor_eval_count;
      }
      if (!std::isfinite(tol_value)) throw NumericalFailure("residual is not finite", k);

      rec.iterations = k;
      rec.residuals.push_back(tol_value);
      rec.deltas.push_back(delta_used);
      if (problem.known_solution) rec.distances.push_back(norm(s.w_curr - *problem.known_solution));
      rec.elapsed.push_back(seconds());
      if (cfg.keep_iterates) rec.iterates.push_back(s.w_curr);
      rec.final_iterate = s.w_curr;

      if (tol_value < cfg.tol) {
        rec.terminated_by = Termination::kTolerance;
        break;
      }
    }
  } catch (const NumericalFailure& e) {
    rec.terminated_by = Termination::kNumericalFailure;
    rec.failure_iteration = e.iteration();
    rec.failure_message = e.what();
  }

  rec.operator_eval_count = s.operator_evals;
  rec.resolvent_call_count = s.resolvent_calls;
  rec.wall_time = seconds();
  return rec;
}

}  // namespace frbs
