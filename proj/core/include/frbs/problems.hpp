#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "frbs/problem.hpp"
#include "frbs/space.hpp"

namespace frbs {

// ---------------------------------------------------------------------------
// Convex minimization in R^3:  min ||w||^2 + (-3, 1, -3) w + ||w||_1
// T w = 2 w + (-3, 1, -3), S = subdifferential of ||.||_1, unique zero (1, 0, 1).

enum class R3Case { kIa, kIb };

Problem make_r3_problem(R3Case initials = R3Case::kIa);

// ---------------------------------------------------------------------------
// Truncated l2 example: S a = 2 a, T a = max(a, 0) componentwise (L = 1),
// unique zero at the origin. Initial points and the anchor are geometric
// sequences.

enum class L2Case { kIIa, kIIb, kIIc, kIId };

inline constexpr Eigen::Index kDefaultTruncDim = 64;

/// first * ratio^i for i = 0 .. dim-1.
Vector geometric_sequence(double first, double ratio, Eigen::Index dim);

/// Throws UsageError if trunc_dim < 8 or the discarded tails of the initial
/// points or anchor have norm >= 1e-10.
Problem make_l2_problem(Eigen::Index trunc_dim = kDefaultTruncDim, L2Case initials = L2Case::kIIa);

// ---------------------------------------------------------------------------
// Linear-quadratic-terminal optimal control on [0, horizon]:
//   x' = P(t) x + Q(t) z,  x(0) = x0,  z(t) in [lower, upper],  min phi(x(T)).
// Controls are piecewise constant on a uniform mesh of K cells, states are
// integrated by forward Euler and the costate by the matching backward sweep.

struct ControlProblem {
  std::function<Eigen::MatrixXd(double)> A_dyn;  // P(t), d x d
  std::function<Eigen::MatrixXd(double)> B_dyn;  // Q(t), d x l
  double horizon = 1.0;
  int mesh = 100;
  Vector x0;
  std::function<Vector(const Vector&)> terminal_grad;
  std::function<double(const Vector&)> terminal_cost;
  Vector lower;  // per control channel
  Vector upper;
  /// Scale the stopping residual by the mesh width h.
  bool weighted_residual = false;

  Eigen::Index state_dim() const { return x0.size(); }
  Eigen::Index control_channels() const { return lower.size(); }
  double h() const { return horizon / mesh; }
};

/// min -x1(2) + x2(2)^2,  x1' = x2,  x2' = z,  x(0) = 0,  z in [-1, 1].
/// Its optimal control is +1 on [0, 1.2) and -1 on (1.2, 2].
ControlProblem double_integrator_problem(int mesh = 100);

void validate(const ControlProblem& spec);

/// States x_0..x_K as rows of a (K+1) x d matrix. z is laid out cell-major:
/// z[j * l + channel].
Eigen::MatrixXd simulate_state(const ControlProblem& spec, const Vector& z);

/// Costates v_0..v_K for a state trajectory, v_K = grad phi(x_K).
Eigen::MatrixXd simulate_costate(const ControlProblem& spec, const Eigen::MatrixXd& states);

/// T z: Q(t_j)' v_{j+1} on every cell. This is the gradient of the discrete
/// objective with respect to the h-weighted inner product.
Vector control_gradient(const ControlProblem& spec, const Vector& z);

/// phi(x_K) for the Euler trajectory driven by z.
double terminal_objective(const ControlProblem& spec, const Vector& z);

/// Piecewise constant control sampled on the mesh from a function of time
/// (evaluated at the cell midpoints).
Vector sample_control(const ControlProblem& spec, const std::function<double(double)>& z_of_t);

/// Decision variable z in R^{K l}; J projects onto the box. Default initial
/// controls are drawn uniformly from the box with the given seed.
Problem make_control_problem(const ControlProblem& spec, std::uint64_t seed = 2021);

// ---------------------------------------------------------------------------
// l1-regularized deblurring:  min ||P w - e||^2 + reg ||w||_1.
// Images are stored row-major in a Vector.

enum class Boundary { kZeroPad, kReplicate };

struct BlurModel {
  Eigen::MatrixXd kernel;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  Boundary boundary = Boundary::kZeroPad;
};

Eigen::MatrixXd gaussian_kernel(int size, double stddev);
BlurModel gaussian_blur(Eigen::Index rows, Eigen::Index cols, int size = 9, double stddev = 4.0,
                        Boundary boundary = Boundary::kZeroPad);
void validate(const BlurModel& model);

Vector apply_blur(const BlurModel& model, const Vector& image);
Vector apply_blur_adjoint(const BlurModel& model, const Vector& image);

/// ||P||^2 estimated by power iteration on P'P.
double blur_norm_squared(const BlurModel& model, int iterations = 50);

/// T w = 2 P'(P w - e), J = soft threshold at delta * reg. Initial points
/// w0 = 0, w1 = 1 and anchor 2 * 1.
Problem make_deblur_problem(const BlurModel& model, const Vector& observed, double reg = 1.0);

/// Smooth background with a disc, a bar and a ramp, intensities in [0, 255].
Vector synthetic_image(Eigen::Index rows, Eigen::Index cols);

Vector add_gaussian_noise(const Vector& image, double stddev, std::uint64_t seed);

/// 20 log10(||reference|| / ||reference - restored||); +inf when equal.
double snr(const Vector& reference, const Vector& restored);

}  // namespace frbs
