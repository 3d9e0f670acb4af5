#include "ilcgap/lqr_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ilcgap/errors.hpp"

namespace ilcgap {

namespace {

constexpr double kSymmetryTolerance = 1e-10;

bool is_symmetric(const Mat& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTolerance * (1.0 + max_abs(m));
}

}  // namespace

TimeVaryingLinearSystem::TimeVaryingLinearSystem(std::vector<Mat> A, std::vector<Mat> B)
    : A_(std::move(A)), B_(std::move(B)) {
  if (A_.empty()) throw InvalidInput("system horizon must be at least 1");
  if (A_.size() != B_.size()) throw InvalidInput("A and B sequences differ in length");
  const auto n = A_.front().rows();
  const auto d = B_.front().cols();
  if (n == 0 || d == 0) throw InvalidInput("state and control dimensions must be positive");
  for (std::size_t t = 0; t < A_.size(); ++t) {
    if (A_[t].rows() != n || A_[t].cols() != n)
      throw InvalidInput("A_" + std::to_string(t) + " is not n×n");
    if (B_[t].rows() != n || B_[t].cols() != d)
      throw InvalidInput("B_" + std::to_string(t) + " is not n×d");
  }
}

TimeVaryingLinearSystem TimeVaryingLinearSystem::time_invariant(const Mat& A, const Mat& B,
                                                                int horizon) {
  if (horizon < 1) throw InvalidInput("system horizon must be at least 1");
  return {std::vector<Mat>(static_cast<std::size_t>(horizon), A),
          std::vector<Mat>(static_cast<std::size_t>(horizon), B)};
}

ApproximateModel ApproximateModel::measured(const TimeVaryingLinearSystem& sys,
                                            std::vector<Mat> Ahat, std::vector<Mat> Bhat) {
  const auto H = static_cast<std::size_t>(sys.horizon());
  if (Ahat.size() != H || Bhat.size() != H)
    throw InvalidInput("approximate model horizon differs from the true system");
  ApproximateModel m{std::move(Ahat), std::move(Bhat), 0.0, 0.0};
  for (std::size_t t = 0; t < H; ++t) {
    const int ti = static_cast<int>(t);
    if (m.Ahat[t].rows() != sys.A(ti).rows() || m.Ahat[t].cols() != sys.A(ti).cols() ||
        m.Bhat[t].rows() != sys.B(ti).rows() || m.Bhat[t].cols() != sys.B(ti).cols())
      throw InvalidInput("approximate model shape differs at t=" + std::to_string(t));
    m.eps_A = std::max(m.eps_A, spectral_norm(sys.A(ti) - m.Ahat[t]));
    m.eps_B = std::max(m.eps_B, spectral_norm(sys.B(ti) - m.Bhat[t]));
  }
  return m;
}

ApproximateModel ApproximateModel::exact(const TimeVaryingLinearSystem& sys) {
  return {sys.A(), sys.B(), 0.0, 0.0};
}

void validate_shapes(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost) {
  const auto n = sys.state_dim();
  const auto d = sys.control_dim();
  if (cost.Q.rows() != n || cost.Q.cols() != n) throw InvalidInput("Q is not n×n");
  if (cost.Qf.rows() != n || cost.Qf.cols() != n) throw InvalidInput("Q_f is not n×n");
  if (cost.R.rows() != d || cost.R.cols() != d) throw InvalidInput("R is not d×d");
  if (!is_symmetric(cost.Q) || !is_symmetric(cost.Qf) || !is_symmetric(cost.R))
    throw InvalidInput("cost matrices must be symmetric");
}

namespace detail {

std::pair<GainSchedule, CostToGoSchedule> riccati_recursion(
    const std::vector<Mat>& Ag, const std::vector<Mat>& Bg, const std::vector<Mat>& Ad,
    const std::vector<Mat>& Bd, const QuadraticCost& cost, bool symmetrize, RecursionKind kind) {
  const auto H = Ag.size();
  const auto n = cost.Q.rows();
  const Mat R_inv = solve_dense(cost.R, Mat::Identity(cost.R.rows(), cost.R.cols()));
  const Mat I = Mat::Identity(n, n);

  GainSchedule K{std::vector<Mat>(H)};
  CostToGoSchedule P{std::vector<Mat>(H + 1)};
  P.P[H] = cost.Qf;

  for (std::size_t s = H; s-- > 0;) {
    const Mat& Pn = P.P[s + 1];
    const Mat BgT_P = Bg[s].transpose() * Pn;
    const Mat normal = cost.R + BgT_P * Bd[s];
    Eigen::FullPivLU<Mat> lu(normal);
    if (!lu.isInvertible()) {
      if (kind == RecursionKind::kIlc)
        throw SynthesisFailure("R + B̂ᵀPB is singular at t=" + std::to_string(s));
      throw InternalError("R + BᵀPB is singular at t=" + std::to_string(s));
    }
    K.K[s] = -lu.solve(BgT_P * Ad[s]);

    const Mat resolvent = I + Bd[s] * R_inv * BgT_P;
    Eigen::FullPivLU<Mat> lu_res(resolvent);
    if (!lu_res.isInvertible()) {
      if (kind == RecursionKind::kIlc)
        throw SynthesisFailure("I + BR⁻¹B̂ᵀP is singular at t=" + std::to_string(s));
      throw InternalError("I + BR⁻¹BᵀP is singular at t=" + std::to_string(s));
    }
    Mat Pt = cost.Q + Ag[s].transpose() * Pn * lu_res.solve(Ad[s]);
    if (symmetrize) Pt = symmetrized(Pt);
    P.P[s] = std::move(Pt);
  }
  return {std::move(K), std::move(P)};
}

}  // namespace detail

std::pair<GainSchedule, CostToGoSchedule> solve_riccati_optimal(const TimeVaryingLinearSystem& sys,
                                                                const QuadraticCost& cost) {
  validate_shapes(sys, cost);
  if (!is_positive_definite(cost.Q) || !is_positive_definite(cost.Qf) ||
      !is_positive_definite(cost.R))
    throw InvalidInput("Q, Q_f and R must be positive definite");
  return detail::riccati_recursion(sys.A(), sys.B(), sys.A(), sys.B(), cost, true,
                                   detail::RecursionKind::kOptimal);
}

double trajectory_cost(const QuadraticCost& cost, const std::vector<Vec>& x,
                       const std::vector<Vec>& u) {
  double total = 0.0;
  for (std::size_t t = 0; t < u.size(); ++t) {
    total += x[t].dot(cost.Q * x[t]) + u[t].dot(cost.R * u[t]);
  }
  total += x.back().dot(cost.Qf * x.back());
  return total;
}

Trajectory rollout_linear(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                          const GainSchedule& K, const Vec& x0) {
  const int H = sys.horizon();
  if (K.horizon() != H) throw InvalidInput("gain schedule horizon differs from the system");
  if (x0.size() != sys.state_dim()) throw InvalidInput("x0 has the wrong dimension");
  Trajectory traj;
  traj.x.reserve(static_cast<std::size_t>(H) + 1);
  traj.u.reserve(static_cast<std::size_t>(H));
  traj.x.push_back(x0);
  for (int t = 0; t < H; ++t) {
    if (K[t].rows() != sys.control_dim() || K[t].cols() != sys.state_dim())
      throw InvalidInput("K_" + std::to_string(t) + " is not d×n");
    traj.u.push_back(K[t] * traj.x.back());
    traj.x.push_back(sys.A(t) * traj.x.back() + sys.B(t) * traj.u.back());
  }
  traj.cost = trajectory_cost(cost, traj.x, traj.u);
  return traj;
}

Trajectory rollout_open_loop(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const std::vector<Vec>& u, const Vec& x0) {
  const int H = sys.horizon();
  if (static_cast<int>(u.size()) != H) throw InvalidInput("control sequence length differs from H");
  if (x0.size() != sys.state_dim()) throw InvalidInput("x0 has the wrong dimension");
  Trajectory traj;
  traj.x.reserve(static_cast<std::size_t>(H) + 1);
  traj.x.push_back(x0);
  traj.u = u;
  for (int t = 0; t < H; ++t) {
    traj.x.push_back(sys.A(t) * traj.x.back() + sys.B(t) * u[static_cast<std::size_t>(t)]);
  }
  traj.cost = trajectory_cost(cost, traj.x, traj.u);
  return traj;
}

std::vector<double> closed_loop_products(const TimeVaryingLinearSystem& sys,
                                         const GainSchedule& K) {
  const int H = sys.horizon();
  if (K.horizon() != H) throw InvalidInput("gain schedule horizon differs from the system");
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(H));
  Mat L = Mat::Identity(sys.state_dim(), sys.state_dim());
  for (int t = 0; t < H; ++t) {
    L = (sys.A(t) + sys.B(t) * K[t]) * L;
    norms.push_back(spectral_norm(L));
  }
  return norms;
}

StabilityCertificate stability_certificate(const TimeVaryingLinearSystem& sys,
                                           const GainSchedule& K) {
  StabilityCertificate cert;
  double worst = 0.0;
  for (int t = 0; t < sys.horizon(); ++t) {
    const double m = spectral_norm(sys.A(t) + sys.B(t) * K[t]);
    cert.per_step_norms.push_back(m);
    worst = std::max(worst, m);
  }
  cert.delta = 1.0 - worst;
  return cert;
}

std::vector<double> assumption3_margins(const TimeVaryingLinearSystem& sys, const Mat& R,
                                        const ApproximateModel& approx) {
  // Pseudo-inverse so that a singular R (reported as an Assumption 1
  // violation) still yields a report.
  const Mat R_inv = R.completeOrthogonalDecomposition().pseudoInverse();
  std::vector<double> margins;
  margins.reserve(static_cast<std::size_t>(sys.horizon()));
  for (int t = 0; t < sys.horizon(); ++t) {
    margins.push_back(min_eigen_real_part(sys.B(t) * R_inv *
                                          approx.Bhat[static_cast<std::size_t>(t)].transpose()));
  }
  return margins;
}

AssumptionReport check_assumptions(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                                   const GainSchedule& K_star, const ApproximateModel& approx) {
  validate_shapes(sys, cost);
  if (approx.horizon() != sys.horizon())
    throw InvalidInput("approximate model horizon differs from the true system");

  AssumptionReport rep;
  rep.q_pd = is_positive_definite(cost.Q);
  rep.qf_pd = is_positive_definite(cost.Qf);
  rep.r_pd = is_positive_definite(cost.R);
  rep.r_min_singular = min_singular_value(cost.R);
  rep.assumption1 = rep.q_pd && rep.qf_pd && rep.r_pd && rep.r_min_singular >= 1.0;

  rep.stability = stability_certificate(sys, K_star);
  rep.assumption2 = rep.stability.valid();

  rep.min_real_eigenvalue = assumption3_margins(sys, cost.R, approx);
  rep.assumption3 = std::all_of(rep.min_real_eigenvalue.begin(), rep.min_real_eigenvalue.end(),
                                [](double re) { return re >= -kAssumption3Tolerance; });
  rep.eps_B_threshold = std::numeric_limits<double>::infinity();
  for (int t = 0; t < sys.horizon(); ++t) {
    const auto ts = static_cast<std::size_t>(t);

    // R cancels: sym(B̂ᵀB) ⪰ (σ_min(BᵀB) − ε_B‖B‖)I makes R⁻¹B̂ᵀB similar to
    // a matrix with PSD symmetric part, for any PD R.
    const double denom = spectral_norm(sys.B(t));
    const double cap =
        denom > 0.0 ? min_singular_value(sys.B(t).transpose() * sys.B(t)) / denom : 0.0;
    rep.eps_B_threshold = std::min(rep.eps_B_threshold, cap);
    rep.eps_B_measured = std::max(rep.eps_B_measured, spectral_norm(sys.B(t) - approx.Bhat[ts]));
  }
  rep.sufficient_condition_met = rep.eps_B_measured <= rep.eps_B_threshold;
  return rep;
}

double gamma_constant(const TimeVaryingLinearSystem& sys, const GainSchedule& K_star,
                      const CostToGoSchedule& P_star) {
  double m = 0.0;
  for (int t = 0; t < sys.horizon(); ++t) {
    m = std::max({m, spectral_norm(sys.A(t)), spectral_norm(sys.B(t)), spectral_norm(K_star[t])});
  }
  for (const auto& P : P_star.P) m = std::max(m, spectral_norm(P));
  return 1.0 + m;
}

}  // namespace ilcgap
