#pragma once

#include <vector>

#include "ilcgap/lqr_core.hpp"

namespace ilcgap {

/// Certainty-equivalent ("misspecified model") controller: the optimal
/// recursion run on (Â, B̂). Same code path as solve_riccati_optimal.
std::pair<GainSchedule, CostToGoSchedule> synthesize_mm(const ApproximateModel& approx,
                                                        const QuadraticCost& cost);

/// Closed-form limit of iterative learning control:
///   K_t = −(R + B̂ᵀP_{t+1}B)⁻¹ B̂ᵀP_{t+1}A
///   P_t = Q + ÂᵀP_{t+1}(I + BR⁻¹B̂ᵀP_{t+1})⁻¹A,   P_H = Q_f.
/// P_t is left unsymmetrized; `asymmetry` and `min_eigen_real` record how far
/// each P_t is from symmetric and whether it kept a positive spectrum.
struct IlcSynthesis {
  GainSchedule K;
  CostToGoSchedule P;
  std::vector<double> asymmetry;       // ‖P_t − P_tᵀ‖, t = 0..H
  std::vector<double> min_eigen_real;  // min Re λ(P_t), t = 0..H
  bool positive_spectrum = true;
};

/// Throws NonconvexSubproblem if Assumption 3 fails at any t and
/// SynthesisFailure if R + B̂ᵀPB becomes singular.
IlcSynthesis synthesize_ilc_closed_form(const TimeVaryingLinearSystem& sys,
                                        const ApproximateModel& approx, const QuadraticCost& cost);

struct ControllerComparison {
  std::vector<double> gain_gaps;  // ‖K*_t − K̂_t‖
  std::vector<double> p_gaps;     // ‖P*_t − P̂_t‖
  double cost_optimal = 0.0;      // V*_0(x0) by rollout
  double cost_hat = 0.0;          // V̂_0(x0) by rollout on the true system
  double cost_gap = 0.0;          // V̂_0 − V*_0
};

ControllerComparison compare_controllers(const TimeVaryingLinearSystem& sys,
                                         const QuadraticCost& cost, const Vec& x0,
                                         const GainSchedule& K_star,
                                         const CostToGoSchedule& P_star,
                                         const GainSchedule& K_hat, const CostToGoSchedule& P_hat);

}  // namespace ilcgap
