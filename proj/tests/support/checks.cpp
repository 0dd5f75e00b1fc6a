#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "frbs/problems.hpp"

namespace frbs::testing {

namespace {

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

Vector random_vector(std::mt19937_64& rng, Eigen::Index dim, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(dim);
  for (auto& x : v) x = u(rng);
  return v;
}

// Minimizer of 0.5 (x - w)^2 + delta |x| over a uniform grid.
double prox_by_grid(double w, double delta, double step) {
  double best = 0.0, best_val = 1e300;
  for (double x = -10.0; x <= 10.0; x += step) {
    const double v = 0.5 * (x - w) * (x - w) + delta * std::abs(x);
    if (v < best_val) best_val = v, best = x;
  }
  return best;
}

bool bit_equal(const IterationState& a, const IterationState& b) {
  return a.w_curr == b.w_curr && a.w_prev == b.w_prev && a.Tw_curr == b.Tw_curr &&
         a.step.delta_curr == b.step.delta_curr && a.step.delta_prev == b.step.delta_prev;
}

// Random monotone affine map T w = M w + q with M = A'A + (B - B').
MonotoneMap random_affine(std::mt19937_64& rng, Eigen::Index dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd A(dim, dim), B(dim, dim);
  for (Eigen::Index i = 0; i < dim * dim; ++i) {
    A.data()[i] = u(rng);
    B.data()[i] = u(rng);
  }
  const Eigen::MatrixXd M = A.transpose() * A + (B - B.transpose());
  const Vector q = random_vector(rng, dim, 1.0);
  const double L = M.operatorNorm();
  return MonotoneMap([M, q](const Vector& w) { return Vector(M * w + q); }, L);
}

}  // namespace

Problem scalar_problem() {
  Problem p;
  p.label = "scalar";
  p.dim = 1;
  p.T = MonotoneMap([](const Vector& w) { return w; }, 1.0);
  p.J = l1_resolvent();
  p.known_solution = make_vector({0.0});
  p.w0 = make_vector({4.0});
  p.w1 = make_vector({2.0});
  p.default_anchor = make_vector({0.0});
  return p;
}

SolverConfig scalar_config(Algorithm algorithm) {
  SolverConfig cfg;
  cfg.algorithm = algorithm;
  cfg.sigma = SequenceSpec(Constant{0.1});
  cfg.c = SequenceSpec(Constant{0.0});
  cfg.delta0 = 0.2;
  cfg.delta1 = 0.2;
  cfg.anchor = make_vector({0.0});
  cfg.gamma = 0.2;
  cfg.lambda = SequenceSpec(Constant{0.2});
  return cfg;
}

CheckResult check_step_size_invariants() {
  // Cap and lower bound along a long run on the l2 operator (L = 1).
  const Problem p = make_l2_problem();
  SolverConfig cfg;
  cfg.r_bar = 0.15;
  cfg.delta0 = 1.0 / 101.0;
  cfg.delta1 = 2.0 / 201.0;
  cfg.c = SequenceSpec(InverseSquare{10.0, 77.0});
  cfg.anchor = *p.default_anchor;
  const double floor = std::min(cfg.r_bar / 1.0, cfg.delta1);

  IterationState s = initial_state(cfg, p.T, p.w0, p.w1);
  for (int k = 1; k <= 10000; ++k) {
    const double before = s.step.delta_curr;
    const auto n = s.step.n;
    s = step(s, cfg, p.T, p.J);
    const double after = s.step.delta_curr;
    if (after > before + cfg.c(n) + 1e-15) return {false, format("cap violated at n=%g: %.17g", double(n), after)};
    if (before >= floor && after < floor - 1e-15) {
      return {false, format("lower bound lost at n=%g: %.17g", double(n), after)};
    }
  }

  // Convergence of the step sequence on the R^3 example.
  const Problem r3 = make_r3_problem();
  SolverConfig rc;
  rc.anchor = *r3.default_anchor;
  IterationState r = initial_state(rc, r3.T, r3.w0, r3.w1);
  double jump = 0.0, tail = 0.0;
  for (int k = 1; k <= 10000; ++k) {
    const double before = r.step.delta_curr;
    tail = rc.c(r.step.n);
    r = step(r, rc, r3.T, r3.J);
    jump = std::abs(r.step.delta_curr - before);
  }
  if (jump > 1e-8 + tail) return {false, format("step still moving: %.3g", jump)};
  return {true, format("10000 steps, lower bound %.4g held, final |delta jump| %.3g", floor, jump)};
}

CheckResult check_resolvent_properties() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.01, 2.0);
  const Vector lo = make_vector({-1.0, -0.5, 0.0}), hi = make_vector({1.0, 0.5, 2.0});
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Vector a = random_vector(rng, 3, 5.0), b = random_vector(rng, 3, 5.0);
    const double delta = d(rng);
    const double gap = norm(a - b);
    for (const Vector& diff : {Vector(soft_threshold(a, delta) - soft_threshold(b, delta)),
                               Vector(box_project(a, lo, hi) - box_project(b, lo, hi)),
                               Vector(scaled_identity_resolvent(a, delta, 2.0) -
                                      scaled_identity_resolvent(b, delta, 2.0))}) {
      worst = std::max(worst, norm(diff) - gap);
    }
  }
  if (worst > 1e-12) return {false, format("resolvent expanded a distance by %.3g", worst)};

  double prox_err = 0.0;
  for (int t = 0; t < 25; ++t) {
    const double w = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
    const double delta = d(rng);
    prox_err = std::max(prox_err, std::abs(soft_threshold(make_vector({w}), delta)[0] - prox_by_grid(w, delta, 1e-4)));
  }
  if (prox_err > 1e-4) return {false, format("prox disagrees with grid oracle by %.3g", prox_err)};
  return {true, format("nonexpansive on 200 pairs, grid prox error %.2g", prox_err)};
}

CheckResult check_reduction_lattice(int trials) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const MonotoneMap T = random_affine(rng, 5);
    const ResolventOp J = l1_resolvent(u01(rng));
    SolverConfig cfg;
    cfg.sigma = SequenceSpec(Constant{0.01 + 0.5 * u01(rng)});
    cfg.delta0 = 0.01 + 0.2 * u01(rng);
    cfg.delta1 = 0.01 + 0.2 * u01(rng);
    cfg.anchor = random_vector(rng, 5, 3.0);
    cfg.theta_bar = 0.0;
    const Vector anchor = cfg.anchor;
    cfg.contraction = Contraction{[anchor](const Vector&) { return anchor; }, 0.0, "anchor"};

    const IterationState s = initial_state(cfg, T, random_vector(rng, 5, 3.0), random_vector(rng, 5, 3.0));
    const IterationState base = frab_step(s, cfg, T, J);
    if (!bit_equal(base, frab_inertial_step(s, cfg, T, J))) return {false, "inertial with theta 0 differs"};
    if (!bit_equal(base, viscosity_step(s, cfg, T, J))) return {false, "viscosity with constant map differs"};
    if (!bit_equal(base, inertial_viscosity_step(s, cfg, T, J))) return {false, "inertial viscosity differs"};
  }
  return {true, std::to_string(trials) + " random steps in R^5 bit-identical"};
}

CheckResult check_fixed_point_preservation(int trials) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    // Box-constrained VI with T w = w - c: the zero is the clamp of c.
    const Vector c = random_vector(rng, 4, 2.0);
    const Vector lo = Vector::Constant(4, -1.0), hi = Vector::Constant(4, 1.0);
    Problem p;
    p.dim = 4;
    p.T = MonotoneMap([c](const Vector& w) { return Vector(w - c); }, 1.0);
    p.J = box_resolvent(lo, hi);
    const Vector sol = box_project(c, lo, hi);

    const double kappa = 0.45 * u01(rng);
    for (Algorithm a : all_algorithms()) {
      SolverConfig cfg;
      cfg.algorithm = a;
      cfg.anchor = sol;
      cfg.theta_bar = 0.04;
      cfg.theta_seq = SequenceSpec(Constant{0.04});
      cfg.fixed_delta = 0.2;
      cfg.contraction = Contraction{[sol, kappa](const Vector& w) { return Vector(sol + kappa * (w - sol)); }, kappa, ""};
      if (!validate(cfg, 1.0).ok()) return {false, "invalid config: " + validate(cfg, 1.0).summary()};
      IterationState s = initial_state(cfg, p.T, sol, sol);
      for (int k = 0; k < 20; ++k) {
        s = step(s, cfg, p.T, p.J);
        // Exact in real arithmetic; sigma v + (1 - sigma) v may round by an ulp.
        if ((s.w_curr - sol).lpNorm<Eigen::Infinity>() > 1e-15 || residual(s.w_curr, p.T, p.J) > 1e-30) {
          return {false, std::string(to_string(a)) + " left the solution"};
        }
      }
    }
  }
  return {true, std::to_string(trials) + " trials x 8 schemes stayed at the zero"};
}

CheckResult check_control_gradient(int mesh, int controls, double rel_tol) {
  const ControlProblem cp = double_integrator_problem(mesh);
  std::mt19937_64 rng(17);
  const double h = cp.h();
  double worst = 0.0;
  for (int t = 0; t < controls; ++t) {
    const Vector z = random_vector(rng, mesh, 1.0);
    const Vector g = control_gradient(cp, z);
    // The gradient is w.r.t. the h-weighted pairing, so d phi / d z_j = h g_j.
    Vector fd(mesh);
    const double eps = 1e-6;
    for (int j = 0; j < mesh; ++j) {
      Vector zp = z, zm = z;
      zp[j] += eps;
      zm[j] -= eps;
      fd[j] = (terminal_objective(cp, zp) - terminal_objective(cp, zm)) / (2 * eps * h);
    }
    worst = std::max(worst, norm(fd - g) / std::max(norm(g), 1e-12));
  }
  if (worst > rel_tol) return {false, format("relative gradient error %.3g > %.1g", worst, rel_tol)};
  return {true, format("worst relative error %.3g over random controls", worst)};
}

CheckResult check_anchored_limit(double tol) {
  const Vector lo = make_vector({-1.0, 0.0}), hi = make_vector({1.0, 2.0});
  Problem p;
  p.dim = 2;
  p.T = MonotoneMap([](const Vector& w) { return Vector(Vector::Zero(w.size())); });
  p.J = box_resolvent(lo, hi);
  p.w0 = make_vector({0.5, 0.5});
  p.w1 = make_vector({-0.5, 1.5});

  SolverConfig cfg;
  cfg.anchor = make_vector({3.0, 0.7});
  cfg.sigma = SequenceSpec(Power{1.0, 1.0, 0.5});
  IterationState s = initial_state(cfg, p.T, p.w0, p.w1);
  for (int k = 0; k < 10000; ++k) s = step(s, cfg, p.T, p.J);
  const double err = (s.w_curr - box_project(cfg.anchor, lo, hi)).lpNorm<Eigen::Infinity>();
  if (err > tol) return {false, format("limit error %.3g after 10000 iterations", err)};
  return {true, format("limit error %.3g after 10000 iterations", err)};
}

}  // namespace frbs::testing
