#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ilcgap/linalg.hpp"

namespace ilcgap {

using Dynamics = std::function<Vec(const Vec& x, const Vec& u)>;
using DynamicsJacobian = std::function<Mat(const Vec& x, const Vec& u)>;

/// Continuous-time dynamics ẋ = f(x, u) discretized with RK4 at step dt.
/// Jacobians are optional; missing ones fall back to central differences.
struct NonlinearSystem {
  int state_dim = 0;
  int control_dim = 0;
  double dt = 0.0;
  int horizon = 0;
  Dynamics f;
  DynamicsJacobian dfdx;
  DynamicsJacobian dfdu;

  Vec step(const Vec& x, const Vec& u) const;

  /// Jacobians of the RK4 map (x, u) ↦ x⁺, by the chain rule through the
  /// four stages.
  void discrete_jacobians(const Vec& x, const Vec& u, Mat& A, Mat& B) const;

  Mat jacobian_x(const Vec& x, const Vec& u) const;
  Mat jacobian_u(const Vec& x, const Vec& u) const;
};

/// One classical Runge–Kutta step with u held constant. Throws
/// NumericBlowup if the result is not finite and InvalidInput if dt ≤ 0.
Vec rk4_step(const Dynamics& f, const Vec& x, const Vec& u, double dt);

struct StageExpansion {
  Vec lx, lu;
  Mat lxx, luu, lux;
};

struct TerminalExpansion {
  Vec lx;
  Mat lxx;
};

/// Σ_{t<H} c(x_t, u_t) + c_f(x_H). Derivatives are optional; missing ones
/// fall back to central differences.
struct RunningCost {
  std::function<double(const Vec&, const Vec&)> stage;
  std::function<double(const Vec&)> terminal;
  std::function<StageExpansion(const Vec&, const Vec&)> stage_expansion;
  std::function<TerminalExpansion(const Vec&)> terminal_expansion;

  StageExpansion expand(const Vec& x, const Vec& u) const;
  TerminalExpansion expand_terminal(const Vec& x) const;
};

/// Costs at or above this value, and any non-finite cost, are reported as
/// this sentinel with the diverged flag set.
inline constexpr double kSentinelCost = 1e12;

struct Rollout {
  std::vector<Vec> x;  // H+1
  std::vector<Vec> u;  // H
  double cost = kSentinelCost;
  bool diverged = true;
};

/// Open-loop rollout. Never throws on blowup; returns the sentinel instead.
Rollout simulate(const NonlinearSystem& sys, const RunningCost& cost, const Vec& x0,
                 const std::vector<Vec>& u);

struct IlqrOptions {
  int max_iters = 200;
  double rel_tol = 1e-9;       // stop when relative cost improvement falls below
  double shrink = 0.5;
  int max_halvings = 20;
  double reg_init = 1e-6;
  double reg_factor = 10.0;
  double reg_max = 1e6;
};

enum class IlqrStop { kTolerance, kLineSearch, kMaxIters, kDiverged };

const char* to_string(IlqrStop stop);

struct IlqrResult {
  std::vector<Vec> u;
  std::vector<Vec> x;
  std::vector<Mat> K;  // feedback gains from the last backward pass
  std::vector<double> cost_trace;  // cost of each accepted iterate, starting with u_init
  double cost = kSentinelCost;
  int iterations = 0;
  IlqrStop stop = IlqrStop::kMaxIters;
  bool diverged = false;

  /// Tolerance met, or no step along the last search direction decreased
  /// the cost.
  bool converged() const { return stop == IlqrStop::kTolerance || stop == IlqrStop::kLineSearch; }
};

/// iLQR with rollouts on `forward` and the backward pass linearized on
/// `backward` around the forward nominal. forward == backward is plain iLQR;
/// true forward with a model backward is the ILC variant. Throws
/// SynthesisFailure if the control Hessian stays indefinite at the maximum
/// regularization.
IlqrResult ilqr(const NonlinearSystem& forward, const NonlinearSystem& backward,
                const RunningCost& cost, const Vec& x0, std::vector<Vec> u_init,
                const IlqrOptions& opts = {});

/// Closed-loop evaluation u_t = ū_t + K_t(x_t − x̄_t) on `sys`.
Rollout simulate_feedback(const NonlinearSystem& sys, const RunningCost& cost, const Vec& x0,
                          const std::vector<Vec>& u_nom, const std::vector<Vec>& x_nom,
                          const std::vector<Mat>& K);

// ---- Testbeds ------------------------------------------------------------

struct PendulumParams {
  double m = 1.0;
  double l = 1.0;
  double g = 9.81;
  double tau_min = -8.0;
  double tau_max = 8.0;
  double dt = 0.05;
  int horizon = 20;
  /// Sign of the gravity term: θ̈ = τ̄/(mℓ²) − gravity_sign·g sin(θ)/ℓ.
  /// +1 makes θ = 0 the stable hanging position; −1 makes it the upright,
  /// unstable one.
  double gravity_sign = 1.0;
};

/// State [θ, θ̇], control [τ], torque clipped to [τ_min, τ_max] inside the
/// dynamics. The clip's derivative is taken as 1 on the closed interval and
/// 0 outside it.
NonlinearSystem pendulum_system(const PendulumParams& p);

double wrap_angle(double theta);

/// 0.1τ² + wrap(θ)² per step and wrap(θ)² at the end.
RunningCost pendulum_cost(double torque_weight = 0.1);

struct QuadrotorParams {
  double m = 1.0;
  double l = 0.3;
  double J = 0.2 * 1.0 * 0.3 * 0.3;
  double g = 9.81;
  double eta = 0.0;  // dispersive wind: adds η·p_x, η·p_y to the accelerations
  double dt = 0.025;
  int horizon = 60;
};

/// State [p_x, p_y, θ, ṗ_x, ṗ_y, θ̇], control [u₁, u₂].
NonlinearSystem quadrotor_system(const QuadrotorParams& p);

/// (x − x_f)ᵀQ(x − x_f) + (u − u_h)ᵀR(u − u_h) per step, (x − x_f)ᵀQ_f(x − x_f) at the end.
RunningCost quadrotor_cost(const Mat& Q, const Mat& R, const Mat& Qf, const Vec& x_goal,
                           const Vec& u_hover);

}  // namespace ilcgap
