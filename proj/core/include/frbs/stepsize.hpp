#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "frbs/space.hpp"

namespace frbs {

/// Operator-value differences at or below this norm take the cap branch of
/// the step-size rule, i.e. are treated as T w_n = T w_{n+1}.
inline constexpr double kOperatorEqualityEps = 1e-30;

/// (delta_{n-1}, delta_n) at iteration n. At n = 1 this is (delta_0, delta_1).
struct StepSizeState {
  double delta_prev = 0.0;
  double delta_curr = 0.0;
  std::int64_t n = 1;
};

/// Self-adaptive step:
///   delta_{n+1} = min{ r ||w_n - w_{n+1}|| / ||T w_n - T w_{n+1}||, delta_n + c_n }
/// or delta_n + c_n when the operator values coincide. Returns the state
/// shifted one index forward. Throws NumericalFailure on non-finite norms.
StepSizeState update_step(const StepSizeState& state, double r_bar, double c_n, const Vector& w_curr,
                          const Vector& w_next, const Vector& Tw_curr, const Vector& Tw_next);

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
  std::string summary() const;
};

/// Checks beta in (0, 1/4), r in (beta, (1 - 2 beta)/2),
/// theta in [0, min{beta/2, (1/2 - r)/2}) and kappa in [0, 1/2).
/// Never throws; every violated bound is listed.
ValidationReport validate_parameters(double r_bar, double beta_bar, double theta_bar, double kappa_bar);

}  // namespace frbs
