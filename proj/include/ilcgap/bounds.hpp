#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ilcgap/lqr_core.hpp"

namespace ilcgap {

/// One compared quantity: the measured value and the bound it should obey.
struct BoundEntry {
  double lhs = 0.0;
  double rhs = 0.0;
  bool preconditions_met = false;
};

/// Measured quantities against bound values, entry by entry. Entries whose
/// preconditions do not hold carry no claim and never count as violations.
struct BoundReport {
  std::string name;
  std::vector<BoundEntry> entries;
  std::map<std::string, double> constants;
  std::map<std::string, std::vector<double>> series;
  std::vector<std::string> notes;

  /// lhs ≤ rhs + kBoundSlack·(1 + |rhs|) on every applicable entry.
  int violations() const;
  int applicable() const;
  bool holds() const { return violations() == 0; }
};

inline constexpr double kBoundSlack = 1e-9;

enum class ControllerKind { kMisspecified, kIlc };

const char* to_string(ControllerKind kind);

/// V̂_0(x0) − V*_0(x0) ≤ dΓ³‖x0‖² Σ_t e^{−δt}‖K*_t − K̂_t‖², valid under
/// Assumption 2, d ≤ n and ‖K*_t − K̂_t‖ ≤ δ/(2‖B_t‖) for every t.
BoundReport theorem1_bound(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                           const Vec& x0, const GainSchedule& K_star,
                           const CostToGoSchedule& P_star, const GainSchedule& K_hat);

/// ‖L_t(K̂)‖ ≤ (1 − δ/2)^{t+1} under the same closeness condition.
BoundReport stability_lemma_check(const TimeVaryingLinearSystem& sys, const GainSchedule& K_star,
                                  const GainSchedule& K_hat);

/// Cost gap by rollout against the sum of optimal-controller advantages
/// x̂ᵀ(K̂−K*)ᵀ(R + BᵀP*B)(K̂−K*)x̂ along the K̂ trajectory. The single entry is
/// |Σ advantages − gap| against kBoundSlack·(1 + |gap|). The constant
/// `printed_variant_residual` records the mismatch if the terminal term
/// −V*_H(x̂_H) were included.
BoundReport performance_difference_check(const TimeVaryingLinearSystem& sys,
                                         const QuadraticCost& cost, const Vec& x0,
                                         const GainSchedule& K_star,
                                         const CostToGoSchedule& P_star,
                                         const GainSchedule& K_hat);

/// Right-hand side of the MM Riccati perturbation bound at one step.
double riccati_rhs_mm(double norm_A, double norm_P_next, double norm_B, double norm_R_inv,
                      double eps_A, double eps_B, double c, double p_gap_next);

/// Right-hand side of the ILC Riccati perturbation bound at one step.
double riccati_rhs_ilc(double norm_A, double norm_P_next, double norm_B, double norm_R_inv,
                       double eps_A, double eps_B, double c, double p_gap_next);

/// κ² + κ²/‖P‖² + κ²(‖P‖ + 1/‖P‖)/(‖P‖² − κ) for κ = κ(P). Empty when
/// ‖P‖² ≤ κ, where the expression is undefined.
std::optional<double> closed_form_c(const Mat& P_star_next);

/// ‖P*_t − P^CE_t‖ against the MM recursion bound with c = κ(P*_{t+1})κ(P^CE_{t+1}).
BoundReport riccati_bound_mm(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const ApproximateModel& approx, const CostToGoSchedule& P_star,
                             const CostToGoSchedule& P_ce);

/// ‖P*_t − P^ILC_t‖ against the ILC recursion bound with
/// c = κ(P*_{t+1})κ(P^ILC_{t+1}). Requires Assumption 3.
BoundReport riccati_bound_ilc(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                              const ApproximateModel& approx, const CostToGoSchedule& P_star,
                              const CostToGoSchedule& P_ilc);

/// f_t from unrolling the Riccati bound recursion from f_H = 0, with the
/// κ-product constant evaluated on the supplied schedules.
std::vector<double> chained_riccati_bound(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                                          const QuadraticCost& cost,
                                          const ApproximateModel& approx,
                                          const CostToGoSchedule& P_star,
                                          const CostToGoSchedule& P_hat);

/// ‖K*_t − K̂_t‖ ≤ cΓ³ε_t, c = 14 (MM) or 6 (ILC), ε_t = max{ε_A, ε_B, f_{t+1}}.
/// f_{t+1} defaults to the measured ‖P*_{t+1} − P̂_{t+1}‖; pass `f` (H+1
/// entries) to use another admissible bound.
BoundReport gain_diff_bound(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                            const QuadraticCost& cost, const ApproximateModel& approx,
                            const GainSchedule& K_star, const CostToGoSchedule& P_star,
                            const GainSchedule& K_hat, const CostToGoSchedule& P_hat,
                            const std::optional<std::vector<double>>& f = std::nullopt);

/// Mismatch confined to t = 0. Entries: [MM gap, ILC gap] against
/// dΓ⁹‖x0‖²(ε_A + ε_A² + ε_B + ε_B²)² and dΓ⁹‖x0‖²(ε_A + ε_B)² with unit
/// constant; they carry no claim because the constant is unspecified.
/// Series `p_gap_mm` / `p_gap_ilc` hold ‖P*_t − P̂_t‖ for t = 0..H.
/// Throws InvalidInput if the model differs from the system at any t ≥ 1.
BoundReport first_step_error_bounds(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                                    const ApproximateModel& approx, const Vec& x0);

/// Calibrates the unspecified constants over a set of first-step instances:
/// C = max over the sweep of gap / expression. Entries are the gaps against
/// C · expression, two per instance (MM then ILC).
BoundReport first_step_sweep(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const std::vector<ApproximateModel>& models, const Vec& x0);

/// Scalar system with â = a − ε_a and b̂ = 0. Checks the exact two-term
/// decompositions of p*_t − p^CE_t and p*_t − p^ILC_t and their b̂ = 0
/// closed forms; each entry is an identity residual against
/// kBoundSlack·(1 + scale). Series `ratio_mm` / `ratio_ilc` give
/// |p*_t − p̂_t| over the scalar bound expressions.
BoundReport scalar_tightness(double a, double b, double q, double r, double eps_a, int H);

/// Randomized check of the two resolvent inequalities used by the Riccati
/// perturbation bounds, and of ‖N(I + MN)⁻¹‖ ≤ ‖N‖, on PSD inputs.
/// Three entries per trial.
BoundReport matrix_lemma_checks(int trials, int max_dim, std::uint64_t seed);

}  // namespace ilcgap
