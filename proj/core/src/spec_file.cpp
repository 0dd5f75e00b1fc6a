// Reader for experiment spec files:
//
//   # comment
//   name = demo
//   problem = l2
//   case = IIa
//   tol = 1e-8
//
//   [anchored]
//   algorithm = frab_adaptive
//   sigma = rational(0.005, 3, 25000)
//
// Keys before the first [section] describe the problem and stopping rule;
// each section adds one algorithm entry named after the section.

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "frbs/harness.hpp"

namespace frbs {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double to_double(const std::string& text) {
  const std::string t = trim(text);
  if (auto slash = t.find('/'); slash != std::string::npos) {
    return to_double(t.substr(0, slash)) / to_double(t.substr(slash + 1));
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw UsageError("expected a number, got '" + t + "'");
  }
  if (used != t.size()) throw UsageError("expected a number, got '" + t + "'");
  return v;
}

std::int64_t to_int(const std::string& text) {
  const double v = to_double(text);
  if (v != std::floor(v) || std::abs(v) > 9e15) throw UsageError("expected an integer, got '" + text + "'");
  return static_cast<std::int64_t>(v);
}

bool to_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw UsageError("expected a boolean, got '" + t + "'");
}

std::vector<double> number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) out.push_back(to_double(tok));
  return out;
}

// "name(args)" -> {name, args}; plain text -> {text, ""}.
std::pair<std::string, std::string> call_form(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') return {t, ""};
  return {trim(std::string_view(t).substr(0, open)), t.substr(open + 1, t.size() - open - 2)};
}

void set_global(ExperimentSpec& spec, const std::string& key, const std::string& value) {
  auto& p = spec.problem;
  if (key == "name") {
    spec.name = value;
  } else if (key == "problem") {
    auto kind = parse_problem_kind(value);
    if (!kind) throw UsageError("unknown problem '" + value + "'");
    p.kind = *kind;
  } else if (key == "case") {
    p.initials = value;
  } else if (key == "trunc_dim") {
    p.trunc_dim = to_int(value);
  } else if (key == "mesh") {
    p.mesh = static_cast<int>(to_int(value));
  } else if (key == "weighted_residual") {
    p.weighted_residual = to_bool(value);
  } else if (key == "seed") {
    p.seed = static_cast<std::uint64_t>(to_int(value));
  } else if (key == "image_rows") {
    p.image_rows = to_int(value);
  } else if (key == "image_cols") {
    p.image_cols = to_int(value);
  } else if (key == "image") {
    p.image_path = value;
  } else if (key == "kernel_size") {
    p.kernel_size = static_cast<int>(to_int(value));
  } else if (key == "blur_stddev") {
    p.blur_stddev = to_double(value);
  } else if (key == "boundary") {
    if (value == "zero") {
      p.boundary = Boundary::kZeroPad;
    } else if (value == "replicate") {
      p.boundary = Boundary::kReplicate;
    } else {
      throw UsageError("boundary must be 'zero' or 'replicate'");
    }
  } else if (key == "reg") {
    p.reg = to_double(value);
  } else if (key == "noise_stddev") {
    p.noise_stddev = to_double(value);
  } else if (key == "tol") {
    spec.tol = to_double(value);
  } else if (key == "max_iter") {
    spec.max_iter = to_int(value);
  } else if (key == "stop") {
    if (value == "residual") {
      spec.stop_rule = StopRule::kResidual;
    } else if (value == "distance") {
      spec.stop_rule = StopRule::kDistance;
    } else {
      throw UsageError("stop must be 'residual' or 'distance'");
    }
  } else if (key == "out") {
    spec.output_dir = value;
  } else if (key == "trace") {
    spec.trace = to_bool(value);
  } else {
    throw UsageError("unknown key '" + key + "'");
  }
}

void set_entry(AlgorithmEntry& e, const std::string& key, const std::string& value) {
  auto& c = e.config;
  if (key == "algorithm") {
    auto a = parse_algorithm(value);
    if (!a) throw UsageError("unknown algorithm '" + value + "'");
    c.algorithm = *a;
  } else if (key == "r_bar") {
    c.r_bar = to_double(value);
  } else if (key == "beta_bar") {
    c.beta_bar = to_double(value);
  } else if (key == "delta0") {
    c.delta0 = to_double(value);
  } else if (key == "delta1") {
    c.delta1 = to_double(value);
  } else if (key == "sigma") {
    c.sigma = SequenceSpec::parse(value);
  } else if (key == "c") {
    c.c = SequenceSpec::parse(value);
  } else if (key == "anchor") {
    e.anchor_spec = value;
  } else if (key == "theta") {
    c.theta_bar = to_double(value);
  } else if (key == "theta_seq") {
    c.theta_seq = SequenceSpec::parse(value);
  } else if (key == "contraction") {
    e.contraction_spec = value;
  } else if (key == "fixed_delta") {
    c.fixed_delta = to_double(value);
  } else if (key == "lambda") {
    c.lambda = SequenceSpec::parse(value);
  } else if (key == "gamma") {
    c.gamma = to_double(value);
  } else {
    throw UsageError("unknown algorithm key '" + key + "'");
  }
}

}  // namespace

Vector resolve_vector(const std::string& text, Eigen::Index dim) {
  const auto [name, args] = call_form(text);
  if (name == "constant") {
    const auto v = number_list(args);
    if (v.size() != 1) throw UsageError("constant(v) takes one value");
    return Vector::Constant(dim, v[0]);
  }
  if (name == "geometric") {
    const auto v = number_list(args);
    if (v.size() != 2) throw UsageError("geometric(first, ratio) takes two values");
    return geometric_sequence(v[0], v[1], dim);
  }
  const auto values = number_list(text);
  if (static_cast<Eigen::Index>(values.size()) != dim) {
    throw UsageError("vector '" + text + "' has " + std::to_string(values.size()) + " entries, problem needs " +
                     std::to_string(dim));
  }
  return make_vector(values);
}

std::optional<Contraction> resolve_contraction(const std::string& text) {
  if (trim(text).empty()) return std::nullopt;
  const auto [name, args] = call_form(text);
  if (name == "scale") {
    const auto v = number_list(args);
    if (v.size() != 1) throw UsageError("scale(k) takes one value");
    const double k = v[0];
    return Contraction{[k](const Vector& w) -> Vector { return k * w; }, std::abs(k), trim(text)};
  }
  // "anchor" is resolved by effective_config once v-hat is known.
  if (name == "anchor") return Contraction{{}, 0.0, "anchor"};
  throw UsageError("unknown contraction '" + text + "'");
}

ExperimentSpec parse_spec(std::istream& in, const std::string& source) {
  ExperimentSpec spec;
  spec.name = source;
  AlgorithmEntry* current = nullptr;
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']') throw UsageError("unterminated section header");
        const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
        if (name.empty()) throw UsageError("empty section name");
        for (const auto& e : spec.entries) {
          if (e.name == name) throw UsageError("duplicate section '" + name + "'");
        }
        spec.entries.push_back(AlgorithmEntry{name, SolverConfig{}, "", ""});
        current = &spec.entries.back();
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw UsageError("expected 'key = value'");
      const std::string key = trim(std::string_view(line).substr(0, eq));
      const std::string value = trim(std::string_view(line).substr(eq + 1));
      if (current) {
        set_entry(*current, key, value);
      } else {
        set_global(spec, key, value);
      }
    } catch (const UsageError& e) {
      throw UsageError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read spec file " + path.string());
  auto spec = parse_spec(in, path.string());
  if (spec.name == path.string()) spec.name = path.stem().string();
  return spec;
}

}  // namespace frbs
