#include "ilcgap/model_mismatch.hpp"

#include <string>

#include "ilcgap/errors.hpp"

namespace ilcgap {

std::pair<GainSchedule, CostToGoSchedule> synthesize_mm(const ApproximateModel& approx,
                                                        const QuadraticCost& cost) {
  return solve_riccati_optimal(approx.as_system(), cost);
}

IlcSynthesis synthesize_ilc_closed_form(const TimeVaryingLinearSystem& sys,
                                        const ApproximateModel& approx, const QuadraticCost& cost) {
  validate_shapes(sys, cost);
  if (approx.horizon() != sys.horizon())
    throw InvalidInput("approximate model horizon differs from the true system");
  if (!is_positive_definite(cost.Q) || !is_positive_definite(cost.Qf) ||
      !is_positive_definite(cost.R))
    throw InvalidInput("Q, Q_f and R must be positive definite");

  const auto margins = assumption3_margins(sys, cost.R, approx);
  for (std::size_t t = 0; t < margins.size(); ++t) {
    if (margins[t] < -kAssumption3Tolerance)
      throw NonconvexSubproblem(
          "nonconvex subproblem: B R⁻¹ B̂ᵀ has an eigenvalue with negative real part at t=" +
          std::to_string(t));
  }

  auto [K, P] = detail::riccati_recursion(approx.Ahat, approx.Bhat, sys.A(), sys.B(), cost,
                                          /*symmetrize=*/false, detail::RecursionKind::kIlc);
  IlcSynthesis out{std::move(K), std::move(P), {}, {}, true};
  for (const auto& Pt : out.P.P) {
    out.asymmetry.push_back(spectral_norm(Pt - Pt.transpose()));
    const double re = min_eigen_real_part(Pt);
    out.min_eigen_real.push_back(re);
    if (!(re > 0.0)) out.positive_spectrum = false;
  }
  return out;
}

ControllerComparison compare_controllers(const TimeVaryingLinearSystem& sys,
                                         const QuadraticCost& cost, const Vec& x0,
                                         const GainSchedule& K_star,
                                         const CostToGoSchedule& P_star,
                                         const GainSchedule& K_hat, const CostToGoSchedule& P_hat) {
  const int H = sys.horizon();
  if (K_star.horizon() != H || K_hat.horizon() != H ||
      static_cast<int>(P_star.P.size()) != H + 1 || static_cast<int>(P_hat.P.size()) != H + 1)
    throw InvalidInput("schedule lengths do not match the system horizon");

  ControllerComparison cmp;
  for (int t = 0; t < H; ++t) cmp.gain_gaps.push_back(spectral_norm(K_star[t] - K_hat[t]));
  for (int t = 0; t <= H; ++t) cmp.p_gaps.push_back(spectral_norm(P_star[t] - P_hat[t]));
  cmp.cost_optimal = rollout_linear(sys, cost, K_star, x0).cost;
  cmp.cost_hat = rollout_linear(sys, cost, K_hat, x0).cost;
  cmp.cost_gap = cmp.cost_hat - cmp.cost_optimal;
  return cmp;
}

}  // namespace ilcgap
