#include "frbs/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace frbs {

StepSizeState update_step(const StepSizeState& state, double r_bar, double c_n, const Vector& w_curr,
                          const Vector& w_next, const Vector& Tw_curr, const Vector& Tw_next) {
  require_same_dim(w_curr, w_next, "update_step");
  require_same_dim(Tw_curr, Tw_next, "update_step");
  require_same_dim(w_curr, Tw_curr, "update_step");

  const double dT = norm(Tw_curr - Tw_next);
  const double dw = norm(w_curr - w_next);
  if (!std::isfinite(dT) || !std::isfinite(dw)) {
    throw NumericalFailure("step size: non-finite difference norm", state.n);
  }

  const double capped = state.delta_curr + c_n;
  double next = capped;
  if (dT > kOperatorEqualityEps) next = std::min(r_bar * dw / dT, capped);

  if (!std::isfinite(next) || !(next > 0.0)) {
    throw NumericalFailure("step size: delta became non-positive or non-finite", state.n);
  }
  return StepSizeState{state.delta_curr, next, state.n + 1};
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

namespace {
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace

ValidationReport validate_parameters(double r_bar, double beta_bar, double theta_bar, double kappa_bar) {
  ValidationReport report;
  auto& v = report.violations;

  if (!(beta_bar > 0.0 && beta_bar < 0.25)) {
    v.push_back("beta_bar = " + num(beta_bar) + " not in (0, 1/4)");
  }
  const double r_hi = (1.0 - 2.0 * beta_bar) / 2.0;
  if (!(r_bar > beta_bar)) {
    v.push_back("r_bar = " + num(r_bar) + " must exceed beta_bar = " + num(beta_bar));
  }
  if (!(r_bar < r_hi)) {
    v.push_back("r_bar = " + num(r_bar) + " must be below (1 - 2 beta_bar)/2 = " + num(r_hi));
  }
  const double theta_hi = std::min(beta_bar / 2.0, (0.5 - r_bar) / 2.0);
  if (!(theta_bar >= 0.0)) {
    v.push_back("theta_bar = " + num(theta_bar) + " must be nonnegative");
  } else if (theta_bar > 0.0 && !(theta_bar < theta_hi)) {
    v.push_back("theta_bar = " + num(theta_bar) + " must be below min{beta_bar/2, (1/2 - r_bar)/2} = " +
                num(theta_hi));
  }
  if (!(kappa_bar >= 0.0 && kappa_bar < 0.5)) {
    v.push_back("kappa_bar = " + num(kappa_bar) + " not in [0, 1/2)");
  }
  return report;
}

}  // namespace frbs
