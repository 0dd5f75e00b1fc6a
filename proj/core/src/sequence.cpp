#include "frbs/sequence.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "frbs/errors.hpp"

namespace frbs {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_number(const std::string& token) {
  const std::string t = trim(token);
  if (t.empty()) throw UsageError("sequence: empty number");
  // a/b fractions are accepted, e.g. "2/201"
  if (auto slash = t.find('/'); slash != std::string::npos) {
    return parse_number(t.substr(0, slash)) / parse_number(t.substr(slash + 1));
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("sequence: cannot parse number '" + t + "'");
  }
  if (used != t.size()) throw UsageError("sequence: cannot parse number '" + t + "'");
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SequenceSpec::SequenceSpec(Kind kind) : kind_(std::move(kind)) {
  if (const auto* t = std::get_if<Table>(&kind_); t && t->values.empty()) {
    throw UsageError("sequence: table must not be empty");
  }
}

double SequenceSpec::operator()(std::int64_t n) const {
  if (n < 0) throw UsageError("sequence: negative index");
  const double x = static_cast<double>(n);
  return std::visit(
      Overloaded{
          [x](const Rational& k) { return k.a / (k.b * x + k.c); },
          [x](const Ratio& k) { return (k.p * x + k.q) / (k.r * x + k.s); },
          [x](const InverseSquare& k) {
            const double d = k.a * x + k.b;
            return 1.0 / (d * d);
          },
          [x](const InverseQuadratic& k) { return 1.0 / (k.a * x * x + k.b * x + k.c); },
          [x](const Power& k) { return k.a / std::pow(x + k.b, k.p); },
          [](const Constant& k) { return k.value; },
          [n](const Table& k) {
            if (n == 0) return k.values.front();
            const auto i = static_cast<std::size_t>(n - 1);
            return i < k.values.size() ? k.values[i] : k.values.back();
          },
      },
      kind_);
}

bool SequenceSpec::summable() const {
  return std::visit(Overloaded{
                        [](const Rational&) { return false; },
                        [](const Ratio& k) { return k.p == 0.0 && k.q == 0.0; },
                        [](const InverseSquare& k) { return k.a != 0.0; },
                        [](const InverseQuadratic& k) { return k.a > 0.0; },
                        [](const Power& k) { return k.p > 1.0 || k.a == 0.0; },
                        [](const Constant& k) { return k.value == 0.0; },
                        [](const Table& k) { return k.values.back() == 0.0; },
                    },
                    kind_);
}

SequenceSpec SequenceSpec::parse(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos) return SequenceSpec(Constant{parse_number(t)});
  if (t.back() != ')') throw UsageError("sequence: missing ')' in '" + t + "'");

  const std::string name = trim(std::string_view(t).substr(0, open));
  std::vector<double> args;
  std::stringstream inner(t.substr(open + 1, t.size() - open - 2));
  for (std::string tok; std::getline(inner, tok, ',');) args.push_back(parse_number(tok));

  auto need = [&](std::size_t count) {
    if (args.size() != count) {
      throw UsageError("sequence: " + name + " expects " + std::to_string(count) + " arguments");
    }
  };
  if (name == "rational") {
    need(3);
    return SequenceSpec(Rational{args[0], args[1], args[2]});
  }
  if (name == "ratio") {
    need(4);
    return SequenceSpec(Ratio{args[0], args[1], args[2], args[3]});
  }
  if (name == "inverse_square") {
    need(2);
    return SequenceSpec(InverseSquare{args[0], args[1]});
  }
  if (name == "inverse_quadratic") {
    need(3);
    return SequenceSpec(InverseQuadratic{args[0], args[1], args[2]});
  }
  if (name == "power") {
    need(3);
    return SequenceSpec(Power{args[0], args[1], args[2]});
  }
  if (name == "constant") {
    need(1);
    return SequenceSpec(Constant{args[0]});
  }
  if (name == "table") {
    if (args.empty()) throw UsageError("sequence: table expects at least one value");
    return SequenceSpec(Table{std::move(args)});
  }
  throw UsageError("sequence: unknown kind '" + name + "'");
}

std::string SequenceSpec::to_string() const {
  return std::visit(
      Overloaded{
          [](const Rational& k) { return "rational(" + fmt(k.a) + ", " + fmt(k.b) + ", " + fmt(k.c) + ")"; },
          [](const Ratio& k) {
            return "ratio(" + fmt(k.p) + ", " + fmt(k.q) + ", " + fmt(k.r) + ", " + fmt(k.s) + ")";
          },
          [](const InverseSquare& k) { return "inverse_square(" + fmt(k.a) + ", " + fmt(k.b) + ")"; },
          [](const InverseQuadratic& k) {
            return "inverse_quadratic(" + fmt(k.a) + ", " + fmt(k.b) + ", " + fmt(k.c) + ")";
          },
          [](const Power& k) { return "power(" + fmt(k.a) + ", " + fmt(k.b) + ", " + fmt(k.p) + ")"; },
          [](const Constant& k) { return "constant(" + fmt(k.value) + ")"; },
          [](const Table& k) {
            std::string out = "table(";
            for (std::size_t i = 0; i < k.values.size(); ++i) {
              if (i) out += ", ";
              out += fmt(k.values[i]);
            }
            return out + ")";
          },
      },
      kind_);
}

}  // namespace frbs
