#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace frbs {

// Closed-form scalar sequences indexed by n >= 1 (n = 0 is allowed where
// a formula is defined there). Evaluated lazily, never materialized.

/// a / (b n + c)
struct Rational {
  double a, b, c;
};
/// (p n + q) / (r n + s)
struct Ratio {
  double p, q, r, s;
};
/// 1 / (a n + b)^2
struct InverseSquare {
  double a, b;
};
/// 1 / (a n^2 + b n + c)
struct InverseQuadratic {
  double a, b, c;
};
/// a / (n + b)^p
struct Power {
  double a, b, p;
};
struct Constant {
  double value;
};
/// values[n-1]; past the end the last value is held.
struct Table {
  std::vector<double> values;
};

class SequenceSpec {
 public:
  using Kind = std::variant<Rational, Ratio, InverseSquare, InverseQuadratic, Power, Constant, Table>;

  SequenceSpec() : kind_(Constant{0.0}) {}
  SequenceSpec(Kind kind);  // NOLINT(google-explicit-constructor)

  double operator()(std::int64_t n) const;

  const Kind& kind() const noexcept { return kind_; }

  /// Parses the textual form, e.g. "rational(0.005, 3, 25000)" or "0.04".
  static SequenceSpec parse(const std::string& text);
  std::string to_string() const;

  /// True for the kinds whose partial sums converge for nonnegative terms
  /// (inverse_square, inverse_quadratic with a > 0, power with p > 1,
  /// constant zero, tables ending in zero).
  bool summable() const;

 private:
  Kind kind_;
};

}  // namespace frbs
