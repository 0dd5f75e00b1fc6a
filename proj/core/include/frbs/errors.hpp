#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace frbs {

/// Caller passed arguments that violate a precondition (dimension
/// mismatch, inverted bounds, missing configuration, ...).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterate, resolvent argument or step size became NaN/Inf.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(const std::string& what, std::int64_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}

  std::int64_t iteration() const noexcept { return iteration_; }

 private:
  std::int64_t iteration_;
};

}  // namespace frbs
