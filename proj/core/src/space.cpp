#include "frbs/space.hpp"

#include <cmath>
#include <string>

namespace frbs {

void require_same_dim(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) +
                     " vs " + std::to_string(b.size()) + ")");
  }
}

double inner(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "inner");
  return a.dot(b);
}

double norm(const Vector& a) { return std::sqrt(a.dot(a)); }

bool all_finite(const Vector& a) { return a.allFinite(); }

Vector make_vector(const std::vector<double>& entries) {
  if (entries.empty()) throw UsageError("make_vector: dimension must be >= 1");
  Vector v = Eigen::Map<const Vector>(entries.data(), static_cast<Eigen::Index>(entries.size()));
  if (!v.allFinite()) throw UsageError("make_vector: non-finite entry");
  return v;
}

Vector make_vector(std::initializer_list<double> entries) {
  return make_vector(std::vector<double>(entries));
}

MonotoneMap::MonotoneMap(Fn fn, std::optional<double> lipschitz)
    : fn_(std::move(fn)), lipschitz_(lipschitz) {
  if (lipschitz_ && !(*lipschitz_ > 0.0)) {
    throw UsageError("MonotoneMap: Lipschitz constant must be positive");
  }
}

Vector MonotoneMap::operator()(const Vector& w) const {
  if (!fn_) throw UsageError("MonotoneMap: empty operator");
  Vector out = fn_(w);
  if (out.size() != w.size()) throw UsageError("MonotoneMap: operator changed the dimension");
  return out;
}

Vector ResolventOp::operator()(const Vector& a, double delta) const {
  if (!fn_) throw UsageError("ResolventOp: empty resolvent");
  if (!(delta > 0.0)) throw UsageError("ResolventOp: delta must be positive");
  Vector out = fn_(a, delta);
  if (out.size() != a.size()) throw UsageError("ResolventOp: resolvent changed the dimension");
  return out;
}

Vector soft_threshold(const Vector& w, double delta) {
  if (!(delta > 0.0)) throw UsageError("soft_threshold: delta must be positive");
  Vector out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double mag = std::abs(w[i]) - delta;
    out[i] = mag > 0.0 ? std::copysign(mag, w[i]) : 0.0;
  }
  return out;
}

Vector box_project(const Vector& w, const Vector& lo, const Vector& hi) {
  require_same_dim(w, lo, "box_project");
  require_same_dim(w, hi, "box_project");
  if ((lo.array() > hi.array()).any()) throw UsageError("box_project: lo > hi");
  return w.cwiseMax(lo).cwiseMin(hi);
}

Vector scaled_identity_resolvent(const Vector& a, double delta, double slope) {
  if (!(delta > 0.0) || !(slope > 0.0)) {
    throw UsageError("scaled_identity_resolvent: delta and slope must be positive");
  }
  return a / (1.0 + delta * slope);
}

ResolventOp l1_resolvent(double weight) {
  if (!(weight > 0.0)) throw UsageError("l1_resolvent: weight must be positive");
  return ResolventOp([weight](const Vector& a, double delta) { return soft_threshold(a, delta * weight); });
}

ResolventOp box_resolvent(Vector lo, Vector hi) {
  require_same_dim(lo, hi, "box_resolvent");
  if ((lo.array() > hi.array()).any()) throw UsageError("box_resolvent: lo > hi");
  return ResolventOp([lo = std::move(lo), hi = std::move(hi)](const Vector& a, double) {
    return box_project(a, lo, hi);
  });
}

ResolventOp scaled_identity(double slope) {
  if (!(slope > 0.0)) throw UsageError("scaled_identity: slope must be positive");
  return ResolventOp([slope](const Vector& a, double delta) {
    return scaled_identity_resolvent(a, delta, slope);
  });
}

}  // namespace frbs
