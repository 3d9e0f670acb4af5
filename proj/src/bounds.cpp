#include "ilcgap/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ilcgap/errors.hpp"
#include "ilcgap/model_mismatch.hpp"

namespace ilcgap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ModelErrors {
  double eps_A = 0.0;
  double eps_B = 0.0;
};

// Declared bounds are never trusted; recompute from the matrix pairs.
ModelErrors measured_errors(const TimeVaryingLinearSystem& sys, const ApproximateModel& approx) {
  if (approx.horizon() != sys.horizon())
    throw InvalidInput("approximate model horizon differs from the true system");
  ModelErrors e;
  for (int t = 0; t < sys.horizon(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    e.eps_A = std::max(e.eps_A, spectral_norm(sys.A(t) - approx.Ahat[ts]));
    e.eps_B = std::max(e.eps_B, spectral_norm(sys.B(t) - approx.Bhat[ts]));
  }
  return e;
}

bool gains_admissible(const TimeVaryingLinearSystem& sys, const GainSchedule& K_star,
                      const GainSchedule& K_hat, double delta, std::vector<double>* radius) {
  bool ok = delta > 0.0;
  for (int t = 0; t < sys.horizon(); ++t) {
    const double nb = spectral_norm(sys.B(t));
    const double r = nb > 0.0 ? delta / (2.0 * nb) : std::numeric_limits<double>::infinity();
    if (radius) radius->push_back(r);
    if (!(spectral_norm(K_star[t] - K_hat[t]) <= r)) ok = false;
  }
  return ok;
}

void check_schedules(const TimeVaryingLinearSystem& sys, const GainSchedule* K_star,
                     const GainSchedule* K_hat, const CostToGoSchedule* P_star,
                     const CostToGoSchedule* P_hat) {
  const int H = sys.horizon();
  if ((K_star && K_star->horizon() != H) || (K_hat && K_hat->horizon() != H) ||
      (P_star && static_cast<int>(P_star->P.size()) != H + 1) ||
      (P_hat && static_cast<int>(P_hat->P.size()) != H + 1))
    throw InvalidInput("schedule lengths do not match the system horizon");
}

Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

// Random PSD matrix of random rank (possibly deficient) and random scale.
Mat random_psd(std::mt19937_64& rng, int dim) {
  std::uniform_int_distribution<int> rank_dist(1, dim);
  std::uniform_real_distribution<double> log_scale(-1.0, 1.0);
  const Mat G = random_matrix(rng, dim, rank_dist(rng));
  return std::pow(10.0, log_scale(rng)) * (G * G.transpose()) / static_cast<double>(dim);
}

}  // namespace

int BoundReport::violations() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(), [](const BoundEntry& e) {
    return e.preconditions_met &&
           !(e.lhs <= e.rhs + kBoundSlack * (1.0 + std::abs(e.rhs)));
  }));
}

int BoundReport::applicable() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const BoundEntry& e) { return e.preconditions_met; }));
}

const char* to_string(ControllerKind kind) {
  return kind == ControllerKind::kMisspecified ? "mm" : "ilc";
}

BoundReport theorem1_bound(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                           const Vec& x0, const GainSchedule& K_star,
                           const CostToGoSchedule& P_star, const GainSchedule& K_hat) {
  check_schedules(sys, &K_star, &K_hat, &P_star, nullptr);
  BoundReport rep;
  rep.name = "theorem1_cost_gap";

  const double gamma = gamma_constant(sys, K_star, P_star);
  const auto cert = stability_certificate(sys, K_star);
  const double delta = cert.delta;
  const int n = sys.state_dim();
  const int d = sys.control_dim();

  std::vector<double> radius;
  const bool admissible = gains_admissible(sys, K_star, K_hat, delta, &radius);

  std::vector<double> gaps;
  double sum = 0.0;
  for (int t = 0; t < sys.horizon(); ++t) {
    const double g = spectral_norm(K_star[t] - K_hat[t]);
    gaps.push_back(g);
    sum += std::exp(-delta * t) * g * g;
  }
  const double x0n = x0.norm();
  const double rhs = d * std::pow(gamma, 3) * x0n * x0n * sum;
  const double lhs =
      rollout_linear(sys, cost, K_hat, x0).cost - rollout_linear(sys, cost, K_star, x0).cost;

  rep.entries.push_back({lhs, rhs, cert.valid() && admissible && d <= n});
  rep.constants = {{"Gamma", gamma}, {"delta", delta},     {"d", static_cast<double>(d)},
                   {"n", static_cast<double>(n)}, {"x0_norm", x0n}};
  rep.series["gain_gap"] = std::move(gaps);
  rep.series["admissible_radius"] = std::move(radius);
  if (!cert.valid()) rep.notes.emplace_back("Assumption 2 fails: max ‖A+BK*‖ ≥ 1");
  if (!admissible) rep.notes.emplace_back("gain gap exceeds δ/(2‖B_t‖) at some t");
  return rep;
}

BoundReport stability_lemma_check(const TimeVaryingLinearSystem& sys, const GainSchedule& K_star,
                                  const GainSchedule& K_hat) {
  check_schedules(sys, &K_star, &K_hat, nullptr, nullptr);
  BoundReport rep;
  rep.name = "stability_lemma";
  const auto cert = stability_certificate(sys, K_star);
  const bool ok = gains_admissible(sys, K_star, K_hat, cert.delta, nullptr);
  const auto products = closed_loop_products(sys, K_hat);
  for (int t = 0; t < sys.horizon(); ++t) {
    rep.entries.push_back({products[static_cast<std::size_t>(t)],
                           std::pow(1.0 - cert.delta / 2.0, t + 1), ok});
  }
  rep.constants["delta"] = cert.delta;
  if (!ok) rep.notes.emplace_back("preconditions not met; no claim");
  return rep;
}

BoundReport performance_difference_check(const TimeVaryingLinearSystem& sys,
                                         const QuadraticCost& cost, const Vec& x0,
                                         const GainSchedule& K_star,
                                         const CostToGoSchedule& P_star,
                                         const GainSchedule& K_hat) {
  check_schedules(sys, &K_star, &K_hat, &P_star, nullptr);
  BoundReport rep;
  rep.name = "performance_difference";

  const auto traj = rollout_linear(sys, cost, K_hat, x0);
  const double v_star = rollout_linear(sys, cost, K_star, x0).cost;
  const double gap = traj.cost - v_star;

  double adv_sum = 0.0;
  std::vector<double> adv;
  for (int t = 0; t < sys.horizon(); ++t) {
    const Vec dk = (K_hat[t] - K_star[t]) * traj.x[static_cast<std::size_t>(t)];
    const Mat H = cost.R + sys.B(t).transpose() * P_star[t + 1] * sys.B(t);
    adv.push_back(dk.dot(H * dk));
    adv_sum += adv.back();
  }
  const Vec& xH = traj.x.back();
  const double terminal = xH.dot(P_star[sys.horizon()] * xH);

  rep.entries.push_back({std::abs(adv_sum - gap), kBoundSlack * (1.0 + std::abs(gap)), true});
  rep.constants = {{"advantage_sum", adv_sum},
                   {"cost_gap", gap},
                   {"terminal_value", terminal},
                   {"printed_variant_residual", std::abs(adv_sum - terminal - gap)}};
  rep.series["advantage"] = std::move(adv);
  return rep;
}

double riccati_rhs_mm(double norm_A, double norm_P_next, double norm_B, double norm_R_inv,
                      double eps_A, double eps_B, double c, double p_gap_next) {
  const double a2p2 = norm_A * norm_A * norm_P_next * norm_P_next;
  return a2p2 * (2.0 * norm_B * norm_R_inv * eps_B + norm_R_inv * eps_B * eps_B) +
         2.0 * norm_A * norm_P_next * eps_A + norm_P_next * eps_A * eps_A +
         c * (norm_A + eps_A) * (norm_A + eps_A) * p_gap_next;
}

double riccati_rhs_ilc(double norm_A, double norm_P_next, double norm_B, double norm_R_inv,
                       double eps_A, double eps_B, double c, double p_gap_next) {
  const double a2p2 = norm_A * norm_A * norm_P_next * norm_P_next;
  return a2p2 * norm_B * norm_R_inv * eps_B + norm_A * norm_P_next * eps_A +
         c * norm_A * (norm_A + eps_A) * p_gap_next;
}

std::optional<double> closed_form_c(const Mat& P_star_next) {
  const double kappa = condition_number(P_star_next);
  const double np = spectral_norm(P_star_next);
  const double denom = np * np - kappa;
  if (!(denom > 0.0) || !std::isfinite(kappa)) return std::nullopt;
  const double k2 = kappa * kappa;
  return k2 + k2 / (np * np) + k2 / denom * (np + 1.0 / np);
}

namespace {

BoundReport riccati_bound(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                          const QuadraticCost& cost, const ApproximateModel& approx,
                          const CostToGoSchedule& P_star, const CostToGoSchedule& P_hat) {
  check_schedules(sys, nullptr, nullptr, &P_star, &P_hat);
  validate_shapes(sys, cost);
  const auto err = measured_errors(sys, approx);
  const double norm_R_inv = spectral_norm(solve_dense(cost.R, Mat::Identity(cost.R.rows(), cost.R.cols())));

  bool assumption3 = true;
  if (kind == ControllerKind::kIlc) {
    for (double re : assumption3_margins(sys, cost.R, approx))
      if (re < -kAssumption3Tolerance) assumption3 = false;
  }

  const int H = sys.horizon();
  BoundReport rep;
  rep.name = kind == ControllerKind::kMisspecified ? "riccati_perturbation_mm"
                                                   : "riccati_perturbation_ilc";
  rep.entries.resize(static_cast<std::size_t>(H));
  std::vector<double> c_kappa(static_cast<std::size_t>(H)), c_closed(static_cast<std::size_t>(H)),
      small(static_cast<std::size_t>(H));

  // Walk backwards so that a failed smallness condition at t+1 disables
  // every earlier entry.
  bool chain_ok = true;
  for (int t = H - 1; t >= 0; --t) {
    const auto ts = static_cast<std::size_t>(t);
    const Mat& Pn = P_star[t + 1];
    const double np = spectral_norm(Pn);
    const double dp_next = spectral_norm(Pn - P_hat[t + 1]);
    const double kappa_prod = condition_number(Pn) * condition_number(P_hat[t + 1]);
    const bool smallness = dp_next <= 1.0 / np;
    chain_ok = chain_ok && smallness;

    const double nA = spectral_norm(sys.A(t));
    const double nB = spectral_norm(sys.B(t));
    const double rhs =
        kind == ControllerKind::kMisspecified
            ? riccati_rhs_mm(nA, np, nB, norm_R_inv, err.eps_A, err.eps_B, kappa_prod, dp_next)
            : riccati_rhs_ilc(nA, np, nB, norm_R_inv, err.eps_A, err.eps_B, kappa_prod, dp_next);
    const double lhs = spectral_norm(P_star[t] - P_hat[t]);

    rep.entries[ts] = {lhs, rhs, chain_ok && assumption3 && std::isfinite(rhs)};
    c_kappa[ts] = kappa_prod;
    c_closed[ts] = closed_form_c(Pn).value_or(kNaN);
    small[ts] = smallness ? 1.0 : 0.0;
  }
  rep.constants = {{"eps_A", err.eps_A}, {"eps_B", err.eps_B}, {"norm_R_inv", norm_R_inv}};
  rep.series["c_kappa_product"] = std::move(c_kappa);
  rep.series["c_closed_form"] = std::move(c_closed);
  rep.series["smallness_met"] = std::move(small);
  if (!assumption3) rep.notes.emplace_back("Assumption 3 fails; no claim");
  if (!chain_ok) rep.notes.emplace_back("smallness condition ‖ΔP‖ ≤ ‖P*‖⁻¹ fails at some t");
  return rep;
}

}  // namespace

BoundReport riccati_bound_mm(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const ApproximateModel& approx, const CostToGoSchedule& P_star,
                             const CostToGoSchedule& P_ce) {
  return riccati_bound(ControllerKind::kMisspecified, sys, cost, approx, P_star, P_ce);
}

BoundReport riccati_bound_ilc(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                              const ApproximateModel& approx, const CostToGoSchedule& P_star,
                              const CostToGoSchedule& P_ilc) {
  return riccati_bound(ControllerKind::kIlc, sys, cost, approx, P_star, P_ilc);
}

std::vector<double> chained_riccati_bound(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                                          const QuadraticCost& cost,
                                          const ApproximateModel& approx,
                                          const CostToGoSchedule& P_star,
                                          const CostToGoSchedule& P_hat) {
  check_schedules(sys, nullptr, nullptr, &P_star, &P_hat);
  const auto err = measured_errors(sys, approx);
  const double norm_R_inv = spectral_norm(solve_dense(cost.R, Mat::Identity(cost.R.rows(), cost.R.cols())));
  const int H = sys.horizon();
  std::vector<double> f(static_cast<std::size_t>(H) + 1, 0.0);
  for (int t = H - 1; t >= 0; --t) {
    const Mat& Pn = P_star[t + 1];
    const double c = condition_number(Pn) * condition_number(P_hat[t + 1]);
    const double nA = spectral_norm(sys.A(t));
    const double nB = spectral_norm(sys.B(t));
    const double np = spectral_norm(Pn);
    const double next = f[static_cast<std::size_t>(t) + 1];
    f[static_cast<std::size_t>(t)] =
        kind == ControllerKind::kMisspecified
            ? riccati_rhs_mm(nA, np, nB, norm_R_inv, err.eps_A, err.eps_B, c, next)
            : riccati_rhs_ilc(nA, np, nB, norm_R_inv, err.eps_A, err.eps_B, c, next);
  }
  return f;
}

BoundReport gain_diff_bound(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                            const QuadraticCost& cost, const ApproximateModel& approx,
                            const GainSchedule& K_star, const CostToGoSchedule& P_star,
                            const GainSchedule& K_hat, const CostToGoSchedule& P_hat,
                            const std::optional<std::vector<double>>& f) {
  check_schedules(sys, &K_star, &K_hat, &P_star, &P_hat);
  const int H = sys.horizon();
  if (f && static_cast<int>(f->size()) != H + 1)
    throw InvalidInput("f must have H+1 entries");

  const auto err = measured_errors(sys, approx);
  const double gamma = gamma_constant(sys, K_star, P_star);
  const bool assumption1 = is_positive_definite(cost.Q) && is_positive_definite(cost.Qf) &&
                           is_positive_definite(cost.R) && min_singular_value(cost.R) >= 1.0;
  bool assumption3 = true;
  if (kind == ControllerKind::kIlc) {
    for (double re : assumption3_margins(sys, cost.R, approx))
      if (re < -kAssumption3Tolerance) assumption3 = false;
  }
  const double coef = kind == ControllerKind::kMisspecified ? 14.0 : 6.0;

  BoundReport rep;
  rep.name = kind == ControllerKind::kMisspecified ? "gain_gap_mm" : "gain_gap_ilc";
  std::vector<double> eps_t;
  for (int t = 0; t < H; ++t) {
    const double f_next =
        f ? (*f)[static_cast<std::size_t>(t) + 1] : spectral_norm(P_star[t + 1] - P_hat[t + 1]);
    const double e = std::max({err.eps_A, err.eps_B, f_next});
    eps_t.push_back(e);
    // The underlying quadratic-minimizer lemma assumes every perturbation
    // is below Γ.
    const bool ok = assumption1 && assumption3 && e < gamma;
    rep.entries.push_back(
        {spectral_norm(K_star[t] - K_hat[t]), coef * std::pow(gamma, 3) * e, ok});
  }
  rep.constants = {{"Gamma", gamma}, {"eps_A", err.eps_A}, {"eps_B", err.eps_B},
                   {"coefficient", coef}};
  rep.series["eps_t"] = std::move(eps_t);
  if (!assumption1) rep.notes.emplace_back("Assumption 1 fails; no claim");
  if (!assumption3) rep.notes.emplace_back("Assumption 3 fails; no claim");
  return rep;
}

BoundReport first_step_error_bounds(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                                    const ApproximateModel& approx, const Vec& x0) {
  if (approx.horizon() != sys.horizon())
    throw InvalidInput("approximate model horizon differs from the true system");
  for (int t = 1; t < sys.horizon(); ++t) {
    const auto ts = static_cast<std::size_t>(t);
    if (approx.Ahat[ts] != sys.A(t) || approx.Bhat[ts] != sys.B(t))
      throw InvalidInput("model differs from the true system at t=" + std::to_string(t) +
                         "; mismatch must be confined to t = 0");
  }

  const auto [K_star, P_star] = solve_riccati_optimal(sys, cost);
  const auto [K_mm, P_mm] = synthesize_mm(approx, cost);
  const auto ilc = synthesize_ilc_closed_form(sys, approx, cost);
  const auto err = measured_errors(sys, approx);

  const double v_star = rollout_linear(sys, cost, K_star, x0).cost;
  const double gap_mm = rollout_linear(sys, cost, K_mm, x0).cost - v_star;
  const double gap_ilc = rollout_linear(sys, cost, ilc.K, x0).cost - v_star;

  const double gamma = gamma_constant(sys, K_star, P_star);
  const double scale = sys.control_dim() * std::pow(gamma, 9) * x0.squaredNorm();
  const double ea = err.eps_A;
  const double eb = err.eps_B;
  const double expr_mm = scale * std::pow(ea + ea * ea + eb + eb * eb, 2);
  const double expr_ilc = scale * std::pow(ea + eb, 2);

  BoundReport rep;
  rep.name = "first_step_error";
  rep.entries = {{gap_mm, expr_mm, false}, {gap_ilc, expr_ilc, false}};

  std::vector<double> pg_mm, pg_ilc;
  double tail_mm = 0.0;
  double tail_ilc = 0.0;
  for (int t = 0; t <= sys.horizon(); ++t) {
    pg_mm.push_back(spectral_norm(P_star[t] - P_mm[t]));
    pg_ilc.push_back(spectral_norm(P_star[t] - ilc.P[t]));
    if (t >= 1) {
      tail_mm = std::max(tail_mm, pg_mm.back());
      tail_ilc = std::max(tail_ilc, pg_ilc.back());
    }
  }
  rep.series["p_gap_mm"] = std::move(pg_mm);
  rep.series["p_gap_ilc"] = std::move(pg_ilc);
  rep.constants = {{"gap_mm", gap_mm},          {"gap_ilc", gap_ilc},
                   {"expr_mm", expr_mm},        {"expr_ilc", expr_ilc},
                   {"tail_p_gap_mm", tail_mm},  {"tail_p_gap_ilc", tail_ilc},
                   {"Gamma", gamma},            {"eps_A", ea},
                   {"eps_B", eb}};
  rep.notes.emplace_back("O(1) constant unspecified; entries carry no claim");
  return rep;
}

BoundReport first_step_sweep(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                             const std::vector<ApproximateModel>& models, const Vec& x0) {
  BoundReport rep;
  rep.name = "first_step_sweep";
  std::vector<double> gap_mm, gap_ilc, expr_mm, expr_ilc, eps;
  for (const auto& m : models) {
    const auto single = first_step_error_bounds(sys, cost, m, x0);
    gap_mm.push_back(single.constants.at("gap_mm"));
    gap_ilc.push_back(single.constants.at("gap_ilc"));
    expr_mm.push_back(single.constants.at("expr_mm"));
    expr_ilc.push_back(single.constants.at("expr_ilc"));
    eps.push_back(std::max(single.constants.at("eps_A"), single.constants.at("eps_B")));
  }
  double c_mm = 0.0;
  double c_ilc = 0.0;
  std::vector<double> ratio_mm, ratio_ilc;
  for (std::size_t i = 0; i < models.size(); ++i) {
    ratio_mm.push_back(expr_mm[i] > 0.0 ? gap_mm[i] / expr_mm[i] : 0.0);
    ratio_ilc.push_back(expr_ilc[i] > 0.0 ? gap_ilc[i] / expr_ilc[i] : 0.0);
    c_mm = std::max(c_mm, ratio_mm.back());
    c_ilc = std::max(c_ilc, ratio_ilc.back());
  }
  for (std::size_t i = 0; i < models.size(); ++i) {
    rep.entries.push_back({gap_mm[i], c_mm * expr_mm[i], true});
    rep.entries.push_back({gap_ilc[i], c_ilc * expr_ilc[i], true});
  }
  rep.constants = {{"C_mm", c_mm}, {"C_ilc", c_ilc}};
  rep.series = {{"eps", eps},           {"gap_mm", gap_mm},       {"gap_ilc", gap_ilc},
                {"ratio_mm", ratio_mm}, {"ratio_ilc", ratio_ilc}};
  return rep;
}

BoundReport scalar_tightness(double a, double b, double q, double r, double eps_a, int H) {
  if (H < 1 || !(q > 0.0) || !(r > 0.0)) throw InvalidInput("scalar instance needs H ≥ 1, q, r > 0");
  const double ah = a - eps_a;
  const double bh = 0.0;
  const double eps_b = b - bh;
  const auto hs = static_cast<std::size_t>(H);

  std::vector<double> ps(hs + 1), pc(hs + 1), pi(hs + 1);
  ps[hs] = pc[hs] = pi[hs] = q;
  for (std::size_t s = hs; s-- > 0;) {
    ps[s] = q + a * a * r * ps[s + 1] / (r + b * b * ps[s + 1]);
    pc[s] = q + ah * ah * r * pc[s + 1] / (r + bh * bh * pc[s + 1]);
    pi[s] = q + a * ah * r * pi[s + 1] / (r + b * bh * pi[s + 1]);
  }

  BoundReport rep;
  rep.name = "scalar_tightness";
  auto identity = [&rep](double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    rep.entries.push_back({std::abs(lhs - rhs), kBoundSlack * scale, true});
  };

  std::vector<double> ratio_mm, ratio_ilc;
  for (std::size_t t = 0; t < hs; ++t) {
    const double p = ps[t + 1];
    const double c = pc[t + 1];
    const double l = pi[t + 1];

    // MM: split of p*_t − p^CE_t into model-error and propagated terms.
    const double first_mm = a * a * r * p / (r + b * b * p) - ah * ah * r * p / (r + bh * bh * p);
    const double second_mm = ah * ah * r * p / (r + bh * bh * p) - ah * ah * r * c / (r + bh * bh * c);
    identity(ps[t] - pc[t], first_mm + second_mm);
    identity(first_mm, p * (a * a - ah * ah) / (1.0 + bh * bh * p / r) +
                           a * a * (bh * bh - b * b) * p * p / r /
                               ((1.0 + b * b * p / r) * (1.0 + bh * bh * p / r)));
    identity(second_mm, ah * ah * (p - c) / ((1.0 + bh * bh * p / r) * (1.0 + bh * bh * c / r)));
    // b̂ = 0 closed forms.
    identity(first_mm, p * (2.0 * a * eps_a - eps_a * eps_a) -
                           a * a * b * b * p * p / r / (1.0 + b * b * p / r));
    identity(second_mm, (a - eps_a) * (a - eps_a) * (p - c));

    // ILC.
    const double first_ilc = a * a * r * p / (r + b * b * p) - a * ah * r * p / (r + b * bh * p);
    const double second_ilc = a * ah * r * p / (r + b * bh * p) - a * ah * r * l / (r + b * bh * l);
    identity(ps[t] - pi[t], first_ilc + second_ilc);
    identity(first_ilc, a * p * (a - ah) / (1.0 + b * bh * p / r) +
                            a * a * b * p * p / r * (bh - b) /
                                ((1.0 + b * b * p / r) * (1.0 + b * bh * p / r)));
    identity(second_ilc, a * ah * (p - l) / ((1.0 + b * bh * p / r) * (1.0 + b * bh * l / r)));
    identity(first_ilc, a * p * eps_a - a * a * b * b * p * p / r / (1.0 + b * b * p / r));
    identity(second_ilc, a * (a - eps_a) * (p - l));

    // Scalar forms of the Riccati perturbation bounds.
    const double aa = std::abs(a);
    const double bb = std::abs(b);
    const double eb = std::abs(eps_b);
    const double ea = std::abs(eps_a);
    const double bound_mm = aa * aa * p * p * (2.0 * bb * eb + eb * eb) / r +
                            p * (2.0 * aa * ea + ea * ea) + (aa + ea) * (aa + ea) * std::abs(p - c);
    const double bound_ilc =
        aa * aa * p * p * bb * eb / r + aa * p * ea + aa * (aa + ea) * std::abs(p - l);
    ratio_mm.push_back(bound_mm > 0.0 ? std::abs(ps[t] - pc[t]) / bound_mm : 0.0);
    ratio_ilc.push_back(bound_ilc > 0.0 ? std::abs(ps[t] - pi[t]) / bound_ilc : 0.0);
  }

  auto [mm_lo, mm_hi] = std::minmax_element(ratio_mm.begin(), ratio_mm.end());
  auto [ilc_lo, ilc_hi] = std::minmax_element(ratio_ilc.begin(), ratio_ilc.end());
  rep.constants = {{"ratio_mm_min", *mm_lo},   {"ratio_mm_max", *mm_hi},
                   {"ratio_ilc_min", *ilc_lo}, {"ratio_ilc_max", *ilc_hi},
                   {"a_hat", ah},              {"eps_b", eps_b}};
  rep.series = {{"p_star", ps}, {"p_mm", pc}, {"p_ilc", pi},
                {"ratio_mm", ratio_mm}, {"ratio_ilc", ratio_ilc}};
  return rep;
}

BoundReport matrix_lemma_checks(int trials, int max_dim, std::uint64_t seed) {
  if (trials < 1) throw InvalidInput("trials must be at least 1");
  if (max_dim < 1) throw InvalidInput("max_dim must be at least 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_dist(1, max_dim);
  std::uniform_real_distribution<double> log_eps(-4.0, 0.5);

  BoundReport rep;
  rep.name = "matrix_lemmas";
  for (int trial = 0; trial < trials; ++trial) {
    const int k = dim_dist(rng);
    const Mat I = Mat::Identity(k, k);

    // ‖AᵀQ(I+SQ)⁻¹A − ÂᵀQ(I+ŜQ)⁻¹Â‖ ≤ ‖A‖²‖Q‖²‖Ŝ−S‖ + 2‖A‖‖Q‖ε + ‖Q‖ε².
    const Mat Q = random_psd(rng, k);
    const Mat S = random_psd(rng, k);
    const Mat S_hat = random_psd(rng, k);
    const Mat A = random_matrix(rng, k, k);
    Mat E = random_matrix(rng, k, k);
    E *= std::pow(10.0, log_eps(rng)) / spectral_norm(E);
    const Mat A_hat = A + E;
    const double eps = spectral_norm(A - A_hat);
    const Mat lhs89 = A.transpose() * Q * solve_dense(I + S * Q, A) -
                      A_hat.transpose() * Q * solve_dense(I + S_hat * Q, A_hat);
    const double nA = spectral_norm(A);
    const double nQ = spectral_norm(Q);
    rep.entries.push_back({spectral_norm(lhs89),
                           nA * nA * nQ * nQ * spectral_norm(S_hat - S) + 2.0 * nA * nQ * eps +
                               nQ * eps * eps,
                           true});

    // ‖N₁(I+MN₁)⁻¹ − N₂(I+MN₂)⁻¹‖ ≤ ‖(I+MN₁)⁻¹‖‖N₁−N₂‖‖(I+MN₂)⁻¹‖.
    const Mat N1 = random_psd(rng, k);
    const Mat N2 = random_psd(rng, k);
    const Mat M = random_psd(rng, k);
    const Mat inv1 = solve_dense(I + M * N1, I);
    const Mat inv2 = solve_dense(I + M * N2, I);
    rep.entries.push_back({spectral_norm(N1 * inv1 - N2 * inv2),
                           spectral_norm(inv1) * spectral_norm(N1 - N2) * spectral_norm(inv2),
                           true});

    // ‖N(I+MN)⁻¹‖ ≤ ‖N‖.
    rep.entries.push_back({spectral_norm(N1 * inv1), spectral_norm(N1), true});
  }
  rep.constants = {{"trials", static_cast<double>(trials)},
                   {"max_dim", static_cast<double>(max_dim)}};
  return rep;
}

}  // namespace ilcgap
