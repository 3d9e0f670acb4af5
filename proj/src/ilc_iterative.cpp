#include "ilcgap/ilc_iterative.hpp"

#include <algorithm>
#include <cmath>

#include "ilcgap/errors.hpp"
#include "ilcgap/model_mismatch.hpp"

namespace ilcgap {

namespace {

double inf_norm(const std::vector<Vec>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, e.cwiseAbs().maxCoeff());
  return m;
}

void check_config(const IlcConfig& config) {
  if (!(config.tol > 0.0)) throw InvalidInput("ILC tolerance must be positive");
  if (config.max_iters < 1) throw InvalidInput("ILC max_iters must be at least 1");
  if (const auto* fixed = std::get_if<FixedStep>(&config.step)) {
    if (!(fixed->alpha > 0.0 && fixed->alpha <= 1.0))
      throw InvalidInput("ILC step size must lie in (0, 1]");
  } else {
    const auto& bt = std::get<Backtracking>(config.step);
    if (!(bt.shrink > 0.0 && bt.shrink < 1.0) || bt.max_halvings < 0)
      throw InvalidInput("ILC backtracking needs shrink in (0, 1) and max_halvings >= 0");
  }
}

}  // namespace

DeltaSolution lqr_delta_subproblem(const ApproximateModel& approx, const QuadraticCost& cost,
                                   const Trajectory& trajectory) {
  const auto H = static_cast<std::size_t>(approx.horizon());
  if (trajectory.u.size() != H || trajectory.x.size() != H + 1)
    throw InvalidInput("trajectory length does not match the model horizon");

  DeltaSolution sol;
  sol.value_hessian.resize(H + 1);
  sol.value_gradient.resize(H + 1);
  sol.feedforward.resize(H);
  sol.feedback.resize(H);

  // Terminal stage: (2x_H + Δx)ᵀQ_fΔx = ΔxᵀQ_fΔx + 2(Q_f x_H)ᵀΔx.
  sol.value_hessian[H] = cost.Qf;
  sol.value_gradient[H] = cost.Qf * trajectory.x[H];

  for (std::size_t t = H; t-- > 0;) {
    const Mat& A = approx.Ahat[t];
    const Mat& B = approx.Bhat[t];
    const Mat& P = sol.value_hessian[t + 1];
    const Vec& p = sol.value_gradient[t + 1];

    const Mat Huu = cost.R + B.transpose() * P * B;
    const Mat Hux = B.transpose() * P * A;
    const Vec gu = cost.R * trajectory.u[t] + B.transpose() * p;
    const Vec gx = cost.Q * trajectory.x[t] + A.transpose() * p;

    Eigen::LLT<Mat> llt(symmetrized(Huu));
    if (llt.info() != Eigen::Success)
      throw NonconvexSubproblem("correction subproblem Hessian is not positive definite at t=" +
                                std::to_string(t));
    sol.feedforward[t] = -llt.solve(gu);
    sol.feedback[t] = -llt.solve(Hux);

    // Quadratic part follows the model Riccati recursion; the linear part
    // carries the stationarity residual gu through the feedback gain.
    sol.value_gradient[t] = gx + sol.feedback[t].transpose() * gu;
    sol.value_hessian[t] =
        symmetrized(cost.Q + A.transpose() * P * A + Hux.transpose() * sol.feedback[t]);
  }

  sol.dx.reserve(H + 1);
  sol.du.reserve(H);
  sol.dx.push_back(Vec::Zero(trajectory.x.front().size()));
  for (std::size_t t = 0; t < H; ++t) {
    sol.du.push_back(sol.feedforward[t] + sol.feedback[t] * sol.dx.back());
    sol.dx.push_back(approx.Ahat[t] * sol.dx.back() + approx.Bhat[t] * sol.du.back());
  }
  return sol;
}

std::vector<Vec> ilc_initial_controls(const ApproximateModel& approx, const QuadraticCost& cost,
                                      const Vec& x0) {
  const auto model = approx.as_system();
  const auto [K_mm, P_mm] = synthesize_mm(approx, cost);
  return rollout_linear(model, cost, K_mm, x0).u;
}

IlcResult run_ilc(const TimeVaryingLinearSystem& sys, const ApproximateModel& approx,
                  const QuadraticCost& cost, const Vec& x0, const IlcConfig& config) {
  return run_ilc_from(sys, approx, cost, x0, ilc_initial_controls(approx, cost, x0), config);
}

IlcResult run_ilc_from(const TimeVaryingLinearSystem& sys, const ApproximateModel& approx,
                       const QuadraticCost& cost, const Vec& x0, std::vector<Vec> u_init,
                       const IlcConfig& config) {
  check_config(config);
  validate_shapes(sys, cost);
  if (approx.horizon() != sys.horizon())
    throw InvalidInput("approximate model horizon differs from the true system");
  const auto margins = assumption3_margins(sys, cost.R, approx);
  for (std::size_t t = 0; t < margins.size(); ++t) {
    if (margins[t] < -kAssumption3Tolerance)
      throw NonconvexSubproblem("nonconvex subproblem: Assumption 3 fails at t=" +
                                std::to_string(t));
  }

  IlcState state;
  state.u = std::move(u_init);
  state.trajectory = rollout_open_loop(sys, cost, state.u, x0);

  IlcResult result;
  result.u = state.u;
  result.trajectory = state.trajectory;

  auto keep_best = [&result](const IlcState& s) {
    if (s.trajectory.cost < result.trajectory.cost) {
      result.u = s.u;
      result.trajectory = s.trajectory;
    }
  };

  for (state.iteration = 0; state.iteration < config.max_iters; ++state.iteration) {
    const DeltaSolution sub = lqr_delta_subproblem(approx, cost, state.trajectory);
    state.last_delta_norm = inf_norm(sub.du);
    IlcIterationLog entry{state.iteration, state.trajectory.cost, state.last_delta_norm, 0.0};

    if (!std::isfinite(state.last_delta_norm)) {
      result.warnings.push_back("non-finite correction at iteration " +
                                std::to_string(state.iteration));
      result.log.push_back(entry);
      return result;
    }
    if (state.last_delta_norm <= config.tol) {
      result.log.push_back(entry);
      result.u = state.u;
      result.trajectory = state.trajectory;
      result.converged = true;
      return result;
    }

    auto step_controls = [&](double alpha) {
      std::vector<Vec> u = state.u;
      for (std::size_t t = 0; t < u.size(); ++t) u[t] += alpha * sub.du[t];
      return u;
    };

    if (const auto* fixed = std::get_if<FixedStep>(&config.step)) {
      state.u = step_controls(fixed->alpha);
      state.trajectory = rollout_open_loop(sys, cost, state.u, x0);
      entry.alpha = fixed->alpha;
    } else {
      const auto& bt = std::get<Backtracking>(config.step);
      double alpha = 1.0;
      bool accepted = false;
      for (int k = 0; k <= bt.max_halvings; ++k, alpha *= bt.shrink) {
        auto u = step_controls(alpha);
        auto traj = rollout_open_loop(sys, cost, u, x0);
        if (std::isfinite(traj.cost) && traj.cost <= state.trajectory.cost) {
          state.u = std::move(u);
          state.trajectory = std::move(traj);
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        result.log.push_back(entry);
        result.warnings.push_back("line search exhausted at iteration " +
                                  std::to_string(state.iteration) + "; ‖Δu‖∞ = " +
                                  std::to_string(state.last_delta_norm));
        keep_best(state);
        return result;
      }
      entry.alpha = alpha;
    }
    result.log.push_back(entry);
    keep_best(state);
  }

  result.warnings.push_back("max_iters reached without convergence");
  return result;
}

}  // namespace ilcgap
