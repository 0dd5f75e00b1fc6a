#pragma once

#include <optional>
#include <string>

#include "frbs/space.hpp"

namespace frbs {

/// A monotone inclusion 0 in (S + T) w, given by T and the resolvent of S,
/// plus whatever is known about it.
struct Problem {
  std::string label;
  MonotoneMap T;
  ResolventOp J;
  Eigen::Index dim = 0;

  std::optional<Vector> known_solution;
  Vector w0;
  Vector w1;
  std::optional<Vector> default_anchor;
  /// Ground truth for SNR reporting (image problems).
  std::optional<Vector> reference;
  /// Multiplies the squared residual norm (mesh weight for control problems).
  double residual_weight = 1.0;
};

}  // namespace frbs
