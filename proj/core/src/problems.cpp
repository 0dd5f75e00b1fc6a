#include "frbs/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace frbs {

// ---------------------------------------------------------------------------
// R^3

Problem make_r3_problem(R3Case initials) {
  const Vector shift = make_vector({-3.0, 1.0, -3.0});
  Problem p;
  p.label = initials == R3Case::kIa ? "r3-case-ia" : "r3-case-ib";
  p.dim = 3;
  p.T = MonotoneMap([shift](const Vector& w) -> Vector { return 2.0 * w + shift; }, 2.0);
  p.J = l1_resolvent();
  p.known_solution = make_vector({1.0, 0.0, 1.0});
  p.default_anchor = make_vector({2.0, 1.0, -6.0});
  if (initials == R3Case::kIa) {
    p.w0 = make_vector({5.0, 1.0, -4.0});
    p.w1 = make_vector({20.0, 4.0, 7.0});
  } else {
    p.w0 = make_vector({-7.0, 10.0, 3.0});
    p.w1 = make_vector({90.0, -3.0, -4.0});
  }
  return p;
}

// ---------------------------------------------------------------------------
// l2

Vector geometric_sequence(double first, double ratio, Eigen::Index dim) {
  if (dim < 1) throw UsageError("geometric_sequence: dim must be >= 1");
  Vector out(dim);
  double term = first;
  for (Eigen::Index i = 0; i < dim; ++i) {
    out[i] = term;
    term *= ratio;
  }
  return out;
}

namespace {

struct Geometric {
  double first;
  double ratio;

  // Norm of the entries from index dim onwards.
  double tail_norm(Eigen::Index dim) const {
    const double r2 = ratio * ratio;
    return std::abs(first) * std::pow(std::abs(ratio), static_cast<double>(dim)) / std::sqrt(1.0 - r2);
  }
};

struct L2Initials {
  Geometric w0, w1;
  const char* label;
};

L2Initials l2_initials(L2Case c) {
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  switch (c) {
    case L2Case::kIIa:
      return {{2.0, -0.5}, {2.0 / 3.0, 1.0 / 6.0}, "l2-case-iia"};
    case L2Case::kIIb:
      return {{4.0, 0.25}, {9.0, inv_sqrt3}, "l2-case-iib"};
    case L2Case::kIIc:
      return {{4.0 / 3.0, 1.0 / 3.0}, {-2.0, -0.5}, "l2-case-iic"};
    case L2Case::kIId:
      return {{-4.0, -0.25}, {20.0, -0.2}, "l2-case-iid"};
  }
  throw UsageError("unknown l2 case");
}

constexpr Geometric kL2Anchor{1.5, -0.5};
constexpr double kL2TailBound = 1e-10;

}  // namespace

Problem make_l2_problem(Eigen::Index trunc_dim, L2Case initials) {
  if (trunc_dim < 8) throw UsageError("make_l2_problem: trunc_dim must be >= 8");
  const auto init = l2_initials(initials);
  for (const auto& g : {init.w0, init.w1, kL2Anchor}) {
    if (g.tail_norm(trunc_dim) >= kL2TailBound) {
      throw UsageError("make_l2_problem: trunc_dim = " + std::to_string(trunc_dim) +
                       " leaves a sequence tail with norm >= 1e-10");
    }
  }

  Problem p;
  p.label = init.label;
  p.dim = trunc_dim;
  p.T = MonotoneMap([](const Vector& a) -> Vector { return a.cwiseMax(0.0); }, 1.0);
  p.J = scaled_identity(2.0);
  p.known_solution = Vector::Zero(trunc_dim);
  p.w0 = geometric_sequence(init.w0.first, init.w0.ratio, trunc_dim);
  p.w1 = geometric_sequence(init.w1.first, init.w1.ratio, trunc_dim);
  p.default_anchor = geometric_sequence(kL2Anchor.first, kL2Anchor.ratio, trunc_dim);
  return p;
}

// ---------------------------------------------------------------------------
// Optimal control

ControlProblem double_integrator_problem(int mesh) {
  ControlProblem cp;
  cp.A_dyn = [](double) {
    Eigen::MatrixXd P(2, 2);
    P << 0.0, 1.0, 0.0, 0.0;
    return P;
  };
  cp.B_dyn = [](double) {
    Eigen::MatrixXd Q(2, 1);
    Q << 0.0, 1.0;
    return Q;
  };
  cp.horizon = 2.0;
  cp.mesh = mesh;
  cp.x0 = Vector::Zero(2);
  cp.terminal_grad = [](const Vector& x) -> Vector { return make_vector({-1.0, 2.0 * x[1]}); };
  cp.terminal_cost = [](const Vector& x) { return -x[0] + x[1] * x[1]; };
  cp.lower = Vector::Constant(1, -1.0);
  cp.upper = Vector::Constant(1, 1.0);
  return cp;
}

void validate(const ControlProblem& spec) {
  if (spec.mesh < 2) throw UsageError("control problem: mesh must be >= 2");
  if (!(spec.horizon > 0.0)) throw UsageError("control problem: horizon must be positive");
  if (!spec.A_dyn || !spec.B_dyn || !spec.terminal_grad) {
    throw UsageError("control problem: dynamics and terminal gradient are required");
  }
  if (spec.x0.size() < 1) throw UsageError("control problem: empty initial state");
  require_same_dim(spec.lower, spec.upper, "control bounds");
  if (spec.lower.size() < 1) throw UsageError("control problem: no control channels");
  if ((spec.lower.array() > spec.upper.array()).any()) throw UsageError("control problem: lower > upper");

  const Eigen::MatrixXd P = spec.A_dyn(0.0);
  const Eigen::MatrixXd Q = spec.B_dyn(0.0);
  const auto d = spec.state_dim();
  if (P.rows() != d || P.cols() != d) throw UsageError("control problem: P(t) must be d x d");
  if (Q.rows() != d || Q.cols() != spec.control_channels()) {
    throw UsageError("control problem: Q(t) must be d x l");
  }
}

namespace {

Eigen::Index control_size(const ControlProblem& spec) { return spec.mesh * spec.control_channels(); }

void require_control(const ControlProblem& spec, const Vector& z) {
  if (z.size() != control_size(spec)) {
    throw UsageError("control problem: control vector has " + std::to_string(z.size()) + " entries, expected " +
                     std::to_string(control_size(spec)));
  }
}

}  // namespace

Eigen::MatrixXd simulate_state(const ControlProblem& spec, const Vector& z) {
  require_control(spec, z);
  const int K = spec.mesh;
  const auto l = spec.control_channels();
  const double h = spec.h();

  Eigen::MatrixXd x(K + 1, spec.state_dim());
  x.row(0) = spec.x0.transpose();
  for (int j = 0; j < K; ++j) {
    const double t = j * h;
    const Vector xj = x.row(j).transpose();
    const Vector zj = z.segment(static_cast<Eigen::Index>(j) * l, l);
    x.row(j + 1) = (xj + h * (spec.A_dyn(t) * xj + spec.B_dyn(t) * zj)).transpose();
  }
  return x;
}

Eigen::MatrixXd simulate_costate(const ControlProblem& spec, const Eigen::MatrixXd& states) {
  const int K = spec.mesh;
  const double h = spec.h();
  if (states.rows() != K + 1 || states.cols() != spec.state_dim()) {
    throw UsageError("simulate_costate: state trajectory has the wrong shape");
  }
  Eigen::MatrixXd v(K + 1, spec.state_dim());
  v.row(K) = spec.terminal_grad(states.row(K).transpose()).transpose();
  for (int j = K - 1; j >= 0; --j) {
    const Vector next = v.row(j + 1).transpose();
    v.row(j) = (next + h * spec.A_dyn(j * h).transpose() * next).transpose();
  }
  return v;
}

Vector control_gradient(const ControlProblem& spec, const Vector& z) {
  const Eigen::MatrixXd v = simulate_costate(spec, simulate_state(spec, z));
  const auto l = spec.control_channels();
  const double h = spec.h();
  Vector g(control_size(spec));
  for (int j = 0; j < spec.mesh; ++j) {
    g.segment(static_cast<Eigen::Index>(j) * l, l) = spec.B_dyn(j * h).transpose() * v.row(j + 1).transpose();
  }
  return g;
}

double terminal_objective(const ControlProblem& spec, const Vector& z) {
  if (!spec.terminal_cost) throw UsageError("terminal_objective: no terminal cost configured");
  const Eigen::MatrixXd x = simulate_state(spec, z);
  return spec.terminal_cost(x.row(spec.mesh).transpose());
}

Vector sample_control(const ControlProblem& spec, const std::function<double(double)>& z_of_t) {
  const auto l = spec.control_channels();
  Vector z(control_size(spec));
  for (int j = 0; j < spec.mesh; ++j) {
    const double t = (j + 0.5) * spec.h();
    for (Eigen::Index c = 0; c < l; ++c) z[j * l + c] = z_of_t(t);
  }
  return z;
}

Problem make_control_problem(const ControlProblem& spec, std::uint64_t seed) {
  validate(spec);
  const auto n = control_size(spec);
  const auto l = spec.control_channels();

  Vector lo(n), hi(n);
  for (int j = 0; j < spec.mesh; ++j) {
    lo.segment(static_cast<Eigen::Index>(j) * l, l) = spec.lower;
    hi.segment(static_cast<Eigen::Index>(j) * l, l) = spec.upper;
  }

  Problem p;
  p.label = "control";
  p.dim = n;
  p.T = MonotoneMap([spec](const Vector& z) { return control_gradient(spec, z); });
  p.J = box_resolvent(lo, hi);
  p.residual_weight = spec.weighted_residual ? spec.h() : 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&] {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = lo[i] + (hi[i] - lo[i]) * unit(rng);
    return z;
  };
  p.w0 = draw();
  p.w1 = draw();
  p.default_anchor = Vector::Zero(n).cwiseMax(lo).cwiseMin(hi);
  return p;
}

// ---------------------------------------------------------------------------
// Deblurring

Eigen::MatrixXd gaussian_kernel(int size, double stddev) {
  if (size < 1 || size % 2 == 0) throw UsageError("gaussian_kernel: size must be odd and positive");
  if (!(stddev > 0.0)) throw UsageError("gaussian_kernel: stddev must be positive");
  const int c = size / 2;
  Eigen::MatrixXd k(size, size);
  for (int a = 0; a < size; ++a) {
    for (int b = 0; b < size; ++b) {
      const double da = a - c, db = b - c;
      k(a, b) = std::exp(-(da * da + db * db) / (2.0 * stddev * stddev));
    }
  }
  return k / k.sum();
}

BlurModel gaussian_blur(Eigen::Index rows, Eigen::Index cols, int size, double stddev, Boundary boundary) {
  BlurModel m{gaussian_kernel(size, stddev), rows, cols, boundary};
  validate(m);
  return m;
}

void validate(const BlurModel& model) {
  if (model.rows < 1 || model.cols < 1) throw UsageError("blur: image dimensions must be positive");
  const auto& k = model.kernel;
  if (k.rows() % 2 == 0 || k.cols() % 2 == 0) throw UsageError("blur: kernel dimensions must be odd");
  if ((k.array() < 0.0).any()) throw UsageError("blur: kernel entries must be nonnegative");
  if (std::abs(k.sum() - 1.0) > 1e-12) throw UsageError("blur: kernel must sum to 1");
  if ((k - k.reverse()).cwiseAbs().maxCoeff() > 1e-12) {
    throw UsageError("blur: kernel must be point-symmetric");
  }
}

namespace {

// Resolves a possibly out-of-range source index; -1 means "outside, zero".
Eigen::Index source_index(Eigen::Index i, Eigen::Index n, Boundary boundary) {
  if (i >= 0 && i < n) return i;
  if (boundary == Boundary::kZeroPad) return -1;
  return std::clamp<Eigen::Index>(i, 0, n - 1);
}

void require_image(const BlurModel& model, const Vector& image) {
  if (image.size() != model.rows * model.cols) {
    throw UsageError("blur: image has " + std::to_string(image.size()) + " pixels, expected " +
                     std::to_string(model.rows * model.cols));
  }
}

}  // namespace

Vector apply_blur(const BlurModel& model, const Vector& image) {
  require_image(model, image);
  const auto R = model.rows, C = model.cols;
  const auto kr = model.kernel.rows(), kc = model.kernel.cols();
  const auto cr = kr / 2, cc = kc / 2;
  Vector out = Vector::Zero(R * C);
  for (Eigen::Index i = 0; i < R; ++i) {
    for (Eigen::Index j = 0; j < C; ++j) {
      double acc = 0.0;
      for (Eigen::Index a = 0; a < kr; ++a) {
        const auto si = source_index(i + a - cr, R, model.boundary);
        if (si < 0) continue;
        for (Eigen::Index b = 0; b < kc; ++b) {
          const auto sj = source_index(j + b - cc, C, model.boundary);
          if (sj < 0) continue;
          acc += model.kernel(a, b) * image[si * C + sj];
        }
      }
      out[i * C + j] = acc;
    }
  }
  return out;
}

Vector apply_blur_adjoint(const BlurModel& model, const Vector& image) {
  require_image(model, image);
  const auto R = model.rows, C = model.cols;
  const auto kr = model.kernel.rows(), kc = model.kernel.cols();
  const auto cr = kr / 2, cc = kc / 2;
  Vector out = Vector::Zero(R * C);
  for (Eigen::Index i = 0; i < R; ++i) {
    for (Eigen::Index j = 0; j < C; ++j) {
      const double u = image[i * C + j];
      for (Eigen::Index a = 0; a < kr; ++a) {
        const auto si = source_index(i + a - cr, R, model.boundary);
        if (si < 0) continue;
        for (Eigen::Index b = 0; b < kc; ++b) {
          const auto sj = source_index(j + b - cc, C, model.boundary);
          if (sj < 0) continue;
          out[si * C + sj] += model.kernel(a, b) * u;
        }
      }
    }
  }
  return out;
}

double blur_norm_squared(const BlurModel& model, int iterations) {
  Vector x = Vector::Ones(model.rows * model.cols);
  x /= x.norm();
  double estimate = 0.0;
  for (int k = 0; k < iterations; ++k) {
    const Vector y = apply_blur_adjoint(model, apply_blur(model, x));
    estimate = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;
    x = y / ny;
  }
  return estimate;
}

Problem make_deblur_problem(const BlurModel& model, const Vector& observed, double reg) {
  validate(model);
  require_image(model, observed);
  if (!(reg > 0.0)) throw UsageError("make_deblur_problem: reg must be positive");

  const auto n = model.rows * model.cols;
  const double lipschitz = 2.0 * blur_norm_squared(model);

  Problem p;
  p.label = "deblur";
  p.dim = n;
  p.T = MonotoneMap(
      [model, observed](const Vector& w) -> Vector {
        return 2.0 * apply_blur_adjoint(model, apply_blur(model, w) - observed);
      },
      lipschitz > 0.0 ? std::optional<double>(lipschitz) : std::nullopt);
  p.J = l1_resolvent(reg);
  p.w0 = Vector::Zero(n);
  p.w1 = Vector::Ones(n);
  p.default_anchor = Vector::Constant(n, 2.0);
  return p;
}

Vector synthetic_image(Eigen::Index rows, Eigen::Index cols) {
  if (rows < 1 || cols < 1) throw UsageError("synthetic_image: dimensions must be positive");
  Vector img(rows * cols);
  const double sr = static_cast<double>(rows) / 32.0;
  const double sc = static_cast<double>(cols) / 32.0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double y = i / sr, x = j / sc;
      double v = 0.2 + 0.1 * std::sin(x / 4.0);
      if ((x - 10.0) * (x - 10.0) + (y - 12.0) * (y - 12.0) < 49.0) v += 0.5;
      if (x > 18.0 && x < 28.0 && y > 5.0 && y < 25.0) v += 0.3;
      img[i * cols + j] = 255.0 * v;
    }
  }
  return img;
}

Vector add_gaussian_noise(const Vector& image, double stddev, std::uint64_t seed) {
  if (stddev < 0.0) throw UsageError("add_gaussian_noise: stddev must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, stddev);
  Vector out = image;
  if (stddev == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += noise(rng);
  return out;
}

double snr(const Vector& reference, const Vector& restored) {
  require_same_dim(reference, restored, "snr");
  const double err = (reference - restored).norm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(reference.norm() / err);
}

}  // namespace frbs
