#pragma once

#include <vector>

#include "ilcgap/linalg.hpp"

namespace ilcgap {

/// x_{t+1} = A_t x_t + B_t u_t for t = 0..H-1.
class TimeVaryingLinearSystem {
 public:
  /// Throws InvalidInput unless every A_t is n×n, every B_t is n×d, and the
  /// two sequences have the same nonzero length.
  TimeVaryingLinearSystem(std::vector<Mat> A, std::vector<Mat> B);

  static TimeVaryingLinearSystem time_invariant(const Mat& A, const Mat& B, int horizon);

  int horizon() const { return static_cast<int>(A_.size()); }
  int state_dim() const { return static_cast<int>(A_.front().rows()); }
  int control_dim() const { return static_cast<int>(B_.front().cols()); }

  const Mat& A(int t) const { return A_[static_cast<std::size_t>(t)]; }
  const Mat& B(int t) const { return B_[static_cast<std::size_t>(t)]; }
  const std::vector<Mat>& A() const { return A_; }
  const std::vector<Mat>& B() const { return B_; }

 private:
  std::vector<Mat> A_;
  std::vector<Mat> B_;
};

/// Σ_t x_tᵀQx_t + u_tᵀRu_t + x_HᵀQ_f x_H.
///
/// Construction only checks shapes and symmetry. Definiteness is a
/// precondition of the synthesis routines and is reported, not enforced,
/// by check_assumptions().
struct QuadraticCost {
  Mat Q;
  Mat Qf;
  Mat R;

  int state_dim() const { return static_cast<int>(Q.rows()); }
  int control_dim() const { return static_cast<int>(R.rows()); }
};

struct GainSchedule {
  std::vector<Mat> K;  // H entries, d×n

  int horizon() const { return static_cast<int>(K.size()); }
  const Mat& operator[](int t) const { return K[static_cast<std::size_t>(t)]; }
};

struct CostToGoSchedule {
  std::vector<Mat> P;  // H+1 entries, P[H] = Q_f

  const Mat& operator[](int t) const { return P[static_cast<std::size_t>(t)]; }
};

struct Trajectory {
  std::vector<Vec> x;  // H+1 states
  std::vector<Vec> u;  // H controls
  double cost = 0.0;
};

/// Per-step closed-loop norms ‖A_t + B_t K_t‖ and δ = 1 − max_t of them.
struct StabilityCertificate {
  double delta = 0.0;
  std::vector<double> per_step_norms;

  /// True when δ ∈ (0, 1].
  bool valid() const { return delta > 0.0 && delta <= 1.0; }
};

/// Approximate model (Â_t, B̂_t) and declared error bounds.
struct ApproximateModel {
  std::vector<Mat> Ahat;
  std::vector<Mat> Bhat;
  double eps_A = 0.0;
  double eps_B = 0.0;

  int horizon() const { return static_cast<int>(Ahat.size()); }

  /// The model with declared bounds replaced by max_t ‖A_t − Â_t‖ and
  /// max_t ‖B_t − B̂_t‖. Throws InvalidInput on horizon or shape mismatch.
  static ApproximateModel measured(const TimeVaryingLinearSystem& sys, std::vector<Mat> Ahat,
                                   std::vector<Mat> Bhat);

  /// Zero-error model equal to the true system.
  static ApproximateModel exact(const TimeVaryingLinearSystem& sys);

  TimeVaryingLinearSystem as_system() const { return {Ahat, Bhat}; }
};

struct AssumptionReport {
  // Q, Q_f, R positive definite and σ_min(R) ≥ 1.
  bool q_pd = false;
  bool qf_pd = false;
  bool r_pd = false;
  double r_min_singular = 0.0;
  bool assumption1 = false;

  // ‖A_t + B_t K*_t‖ ≤ 1 − δ with δ > 0.
  StabilityCertificate stability;
  bool assumption2 = false;

  // Re λ(B_t R⁻¹ B̂_tᵀ) ≥ −1e-10 for every t.
  std::vector<double> min_real_eigenvalue;
  bool assumption3 = false;

  /// min_t σ_min(B_tᵀB_t) / ‖B_t‖: ε_B at or below it implies Assumption 3.
  /// Equal to σ_min(B_tᵀRB_t)/‖B_tᵀR‖ whenever R is a multiple of identity.
  double eps_B_threshold = 0.0;
  double eps_B_measured = 0.0;
  bool sufficient_condition_met = false;
};

/// Real part at or above −kAssumption3Tolerance counts as nonnegative.
inline constexpr double kAssumption3Tolerance = 1e-10;

/// Finite-horizon optimal gains K*_t and cost-to-go P*_t, using
/// P_t = Q + AᵀP(I + BR⁻¹BᵀP)⁻¹A with symmetrization after each step.
/// Throws InvalidInput for shape mismatch or non-PD cost matrices.
std::pair<GainSchedule, CostToGoSchedule> solve_riccati_optimal(const TimeVaryingLinearSystem& sys,
                                                                const QuadraticCost& cost);

/// Closed-loop rollout with u_t = K_t x_t.
Trajectory rollout_linear(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                          const GainSchedule& K, const Vec& x0);

/// Rollout of a fixed control sequence.
Trajectory rollout_open_loop(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const std::vector<Vec>& u, const Vec& x0);

double trajectory_cost(const QuadraticCost& cost, const std::vector<Vec>& x,
                       const std::vector<Vec>& u);

/// ‖L_t(K)‖ = ‖M_t ⋯ M_0‖ with M_i = A_i + B_i K_i, for t = 0..H-1.
std::vector<double> closed_loop_products(const TimeVaryingLinearSystem& sys, const GainSchedule& K);

StabilityCertificate stability_certificate(const TimeVaryingLinearSystem& sys,
                                           const GainSchedule& K);

/// Smallest real part of the spectrum of B_t R⁻¹ B̂_tᵀ, per t.
std::vector<double> assumption3_margins(const TimeVaryingLinearSystem& sys, const Mat& R,
                                        const ApproximateModel& approx);

AssumptionReport check_assumptions(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                                   const GainSchedule& K_star, const ApproximateModel& approx);

/// Γ = 1 + max_t {‖A_t‖, ‖B_t‖, ‖P*_t‖, ‖K*_t‖}.
double gamma_constant(const TimeVaryingLinearSystem& sys, const GainSchedule& K_star,
                      const CostToGoSchedule& P_star);

void validate_shapes(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost);

namespace detail {

enum class RecursionKind { kOptimal, kIlc };

/// Shared backward recursion
///   K_t = −(R + Bgᵀ P Bd)⁻¹ Bgᵀ P Ad
///   P_t = Q + Agᵀ P (I + Bd R⁻¹ Bgᵀ P)⁻¹ Ad
/// where (Ag, Bg) enter on the "gain" side and (Ad, Bd) on the "dynamics"
/// side. Optimal and MM pass the same pair twice; ILC passes the model as
/// (Ag, Bg) and the true system as (Ad, Bd).
std::pair<GainSchedule, CostToGoSchedule> riccati_recursion(
    const std::vector<Mat>& Ag, const std::vector<Mat>& Bg, const std::vector<Mat>& Ad,
    const std::vector<Mat>& Bd, const QuadraticCost& cost, bool symmetrize, RecursionKind kind);

}  // namespace detail

}  // namespace ilcgap
