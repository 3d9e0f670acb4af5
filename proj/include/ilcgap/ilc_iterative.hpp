#pragma once

#include <string>
#include <variant>
#include <vector>

#include "ilcgap/lqr_core.hpp"

namespace ilcgap {

/// Solution of one ILC correction subproblem
///
///   min Σ_t (2x_t + Δx_t)ᵀQΔx_t + (2u_t + Δu_t)ᵀRΔu_t + (2x_H + Δx_H)ᵀQ_fΔx_H
///   s.t. Δx_{t+1} = Â_tΔx_t + B̂_tΔu_t,  Δx_0 = 0
///
/// around an observed true-system trajectory (x, u). The value function of
/// the subproblem is ΔxᵀP_tΔx + 2p_tᵀΔx + const; `value_hessian` holds P_t
/// (the Riccati recursion of the model) and `value_gradient` holds p_t. At
/// the ILC fixed point p_t equals P^ILC_t x_t.
struct DeltaSolution {
  std::vector<Vec> dx;              // H+1, dx[0] = 0
  std::vector<Vec> du;              // H
  std::vector<Mat> value_hessian;   // H+1
  std::vector<Vec> value_gradient;  // H+1
  std::vector<Vec> feedforward;     // H, du_t = feedforward_t + feedback_t dx_t
  std::vector<Mat> feedback;        // H
};

/// Throws NonconvexSubproblem if R + B̂ᵀP_{t+1}B̂ is not positive definite.
DeltaSolution lqr_delta_subproblem(const ApproximateModel& approx, const QuadraticCost& cost,
                                   const Trajectory& trajectory);

struct FixedStep {
  double alpha = 1.0;
};

struct Backtracking {
  double shrink = 0.5;
  int max_halvings = 20;
};

struct IlcConfig {
  std::variant<FixedStep, Backtracking> step = Backtracking{};
  double tol = 1e-8;  // on ‖Δu‖_∞
  int max_iters = 500;
};

struct IlcState {
  std::vector<Vec> u;
  Trajectory trajectory;  // true-system rollout of u
  int iteration = 0;
  double last_delta_norm = 0.0;
};

struct IlcIterationLog {
  int iteration = 0;
  double cost = 0.0;        // true-system cost before the update
  double delta_norm = 0.0;  // ‖Δu‖_∞ of the subproblem at this iterate
  double alpha = 0.0;       // accepted step, 0 when no step was taken
};

struct IlcResult {
  std::vector<Vec> u;
  Trajectory trajectory;
  std::vector<IlcIterationLog> log;
  bool converged = false;
  std::vector<std::string> warnings;
};

/// Open-loop controls from rolling the MM gain schedule out on the model.
std::vector<Vec> ilc_initial_controls(const ApproximateModel& approx, const QuadraticCost& cost,
                                      const Vec& x0);

/// Iterative learning control: repeated true-system rollouts with
/// corrections from lqr_delta_subproblem on the model. Stops when
/// ‖Δu‖_∞ ≤ tol. Returns the lowest-cost iterate and converged = false when
/// max_iters is reached or backtracking cannot find a nonincreasing step.
/// Throws NonconvexSubproblem when Assumption 3 fails.
IlcResult run_ilc(const TimeVaryingLinearSystem& sys, const ApproximateModel& approx,
                  const QuadraticCost& cost, const Vec& x0, const IlcConfig& config = {});

/// Same iteration from caller-supplied initial controls.
IlcResult run_ilc_from(const TimeVaryingLinearSystem& sys, const ApproximateModel& approx,
                       const QuadraticCost& cost, const Vec& x0, std::vector<Vec> u_init,
                       const IlcConfig& config = {});

}  // namespace ilcgap
