#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "frbs/errors.hpp"

namespace frbs {

/// Dense point of the ambient space. Truncated l2 sequences live here too.
using Vector = Eigen::VectorXd;

double inner(const Vector& a, const Vector& b);
double norm(const Vector& a);
bool all_finite(const Vector& a);

/// Throws UsageError unless a and b have the same dimension.
void require_same_dim(const Vector& a, const Vector& b, const char* what);

/// Builds a vector from a list, rejecting empty input and non-finite entries.
Vector make_vector(std::initializer_list<double> entries);
Vector make_vector(const std::vector<double>& entries);

/// Single-valued monotone operator T. `lipschitz` is metadata: fixed-step
/// schemes need it, the adaptive ones never read it.
class MonotoneMap {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  MonotoneMap() = default;
  explicit MonotoneMap(Fn fn, std::optional<double> lipschitz = std::nullopt);

  Vector operator()(const Vector& w) const;
  const std::optional<double>& lipschitz() const noexcept { return lipschitz_; }
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
  std::optional<double> lipschitz_;
};

/// Resolvent J_delta = (I + delta S)^{-1} of a maximal monotone operator S.
class ResolventOp {
 public:
  using Fn = std::function<Vector(const Vector&, double)>;

  ResolventOp() = default;
  explicit ResolventOp(Fn fn) : fn_(std::move(fn)) {}

  Vector operator()(const Vector& a, double delta) const;
  explicit operator bool() const noexcept { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
};

/// Prox of delta*||.||_1: sign(w_i) max(|w_i| - delta, 0).
Vector soft_threshold(const Vector& w, double delta);

/// Componentwise clamp onto [lo, hi]. This is the resolvent of the normal
/// cone of the box for every delta > 0.
Vector box_project(const Vector& w, const Vector& lo, const Vector& hi);

/// Resolvent of S = slope * I, i.e. a / (1 + delta * slope).
Vector scaled_identity_resolvent(const Vector& a, double delta, double slope);

// Ready-made ResolventOp wrappers.
ResolventOp l1_resolvent(double weight = 1.0);
ResolventOp box_resolvent(Vector lo, Vector hi);
ResolventOp scaled_identity(double slope);

}  // namespace frbs
