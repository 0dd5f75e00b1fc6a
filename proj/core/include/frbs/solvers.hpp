#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frbs/problem.hpp"
#include "frbs/sequence.hpp"
#include "frbs/space.hpp"
#include "frbs/stepsize.hpp"

namespace frbs {

enum class Algorithm {
  kFrabAdaptive,          // anchored, self-adaptive step
  kFrabFixed,             // anchored, constant step in (0, 1/(2L))
  kFrabInertial,          // anchored + constant inertia
  kFrabInertialVariable,  // anchored + nondecreasing inertia sequence
  kViscosity,             // contraction U in place of the anchor
  kInertialViscosity,
  kFrbsmBaseline,         // forward-reflected-backward, variable step
  kRfbsmBaseline,         // reflected-forward-backward, constant step
};

std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

/// True for the six anchored/viscosity schemes (one T and one J per step).
bool is_anchored_scheme(Algorithm algorithm);

struct Contraction {
  std::function<Vector(const Vector&)> map;
  double kappa = 0.0;
  /// Textual form used in spec files ("scale(0.4)", "anchor").
  std::string description;
};

enum class StopRule {
  kResidual,  // 0.5 * weight * ||w - J_1(w - T w)||^2
  kDistance,  // 0.5 * ||w - known_solution||^2
};

struct SolverConfig {
  Algorithm algorithm = Algorithm::kFrabAdaptive;

  double r_bar = 0.3;
  double beta_bar = 0.1;
  double delta0 = 0.1;
  double delta1 = 0.3;
  SequenceSpec sigma = SequenceSpec(Rational{0.005, 3.0, 25000.0});
  SequenceSpec c = SequenceSpec(InverseQuadratic{1.0, 0.0, 1.0});

  /// Anchor v-hat. Empty means "use the problem's default anchor".
  Vector anchor;

  double theta_bar = 0.0;
  /// Variable inertia theta_n (kFrabInertialVariable).
  std::optional<SequenceSpec> theta_seq;

  std::optional<Contraction> contraction;
  std::optional<double> fixed_delta;

  /// FRBSM step sequence lambda_n; lambda_0 is taken to be delta0.
  SequenceSpec lambda = SequenceSpec(Ratio{1.0, 1.0, 15.0, 10.0});
  /// RFBSM constant step.
  double gamma = 0.075;

  std::int64_t max_iter = 1000;
  double tol = 1e-8;
  StopRule stop_rule = StopRule::kResidual;
  bool keep_iterates = false;

  /// Overrides for the problem's default initial points.
  std::optional<Vector> w0;
  std::optional<Vector> w1;
};

/// Checks every constraint the selected algorithm places on its
/// parameters. `lipschitz` is needed only for the fixed-step scheme.
ValidationReport validate(const SolverConfig& cfg, std::optional<double> lipschitz = std::nullopt);

/// (w_{n-1}, w_n) with cached operator values and step sizes at index n.
struct IterationState {
  Vector w_prev;
  Vector w_curr;
  Vector Tw_prev;
  Vector Tw_curr;
  /// False when the scheme never evaluates T at its own iterates (RFBSM).
  bool Tw_valid = true;
  StepSizeState step;

  std::int64_t operator_evals = 0;
  std::int64_t resolvent_calls = 0;

  std::int64_t n() const noexcept { return step.n; }
};

/// State at n = 1 from (w0, w1). Evaluates T twice unless the scheme is RFBSM.
IterationState initial_state(const SolverConfig& cfg, const MonotoneMap& T, const Vector& w0, const Vector& w1);

// One iteration of each scheme. All are pure: the input state is not
// modified. Each throws NumericalFailure on a non-finite resolvent argument,
// iterate or step size.
IterationState frab_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                         const ResolventOp& J);
IterationState frab_fixed_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                               const ResolventOp& J);
IterationState frab_inertial_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                                  const ResolventOp& J);
IterationState viscosity_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                              const ResolventOp& J);
IterationState inertial_viscosity_step(const IterationState& state, const SolverConfig& cfg,
                                       const MonotoneMap& T, const ResolventOp& J);
IterationState frbsm_baseline_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                                   const ResolventOp& J);
IterationState rfbsm_baseline_step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                                   const ResolventOp& J);

/// Dispatches on cfg.algorithm.
IterationState step(const IterationState& state, const SolverConfig& cfg, const MonotoneMap& T,
                    const ResolventOp& J);

/// Step size used by the iteration that leaves `state` (delta_n, fixed
/// delta, lambda_n or gamma).
double current_step(const IterationState& state, const SolverConfig& cfg);

/// Natural residual 0.5 * weight * ||w - J_1(w - T w)||^2.
double residual(const Vector& w, const MonotoneMap& T, const ResolventOp& J, double weight = 1.0);
/// Same, with T w supplied by the caller.
double residual_from(const Vector& w, const Vector& Tw, const ResolventOp& J, double weight = 1.0);

enum class Termination { kTolerance, kMaxIter, kNumericalFailure };
std::string_view to_string(Termination t);

struct RunRecord {
  Algorithm algorithm = Algorithm::kFrabAdaptive;

  /// Tol_n for n = 1..iterations under the configured stop rule.
  std::vector<double> residuals;
  /// Step size used by iteration n.
  std::vector<double> deltas;
  /// ||w_{n+1} - known_solution||, empty when the problem has none.
  std::vector<double> distances;
  /// Seconds since the start of the run, per iteration.
  std::vector<double> elapsed;
  std::vector<Vector> iterates;

  Vector final_iterate;
  std::int64_t iterations = 0;
  Termination terminated_by = Termination::kMaxIter;
  std::optional<std::int64_t> failure_iteration;
  std::string failure_message;
  double wall_time = 0.0;

  std::int64_t operator_eval_count = 0;
  std::int64_t resolvent_call_count = 0;
  /// T evaluations spent only on the stopping test (RFBSM).
  std::int64_t monitor_eval_count = 0;
};

/// Iterates until Tol_n < cfg.tol or cfg.max_iter. Throws UsageError when the
/// configuration is invalid; numerical failures are recorded, not thrown.
RunRecord run(const Problem& problem, const SolverConfig& cfg);

}  // namespace frbs
