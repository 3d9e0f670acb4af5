#include "ilcgap/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "ilcgap/errors.hpp"
#include "ilcgap/model_mismatch.hpp"
#include "ilcgap/random_instances.hpp"

namespace ilcgap {

namespace {

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be
// written to per-index slots so the output does not depend on scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) throw InternalError("non-finite value reached CSV output");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Cost with the sentinel applied; sets `diverged` when capped.
double capped(double cost, bool& diverged) {
  if (!std::isfinite(cost) || cost >= kSentinelCost) {
    diverged = true;
    return kSentinelCost;
  }
  return cost;
}

void finish_gaps(SweepRow& row) {
  row.gap_mm = row.cost_mm - row.cost_opt;
  row.gap_ilc = row.cost_ilc - row.cost_opt;
}

}  // namespace

const char* to_string(RowFlag flag) {
  switch (flag) {
    case RowFlag::kOk: return "ok";
    case RowFlag::kDiverged: return "diverged";
    case RowFlag::kAssumptionViolated: return "assumption_violated";
    case RowFlag::kNonconverged: return "nonconverged";
  }
  return "unknown";
}

std::vector<double> GridSpec::resolve(double cap) const {
  std::vector<double> g;
  switch (kind) {
    case Kind::kExplicit:
      g = values;
      break;
    case Kind::kLog: {
      const double hi = max_is_cap ? cap : max;
      if (!(min > 0.0) || !(hi > min) || points < 2)
        throw ConfigError("log grid needs 0 < min < max and at least two points");
      const double l0 = std::log10(min);
      const double l1 = std::log10(hi);
      for (int i = 0; i < points; ++i)
        g.push_back(i + 1 == points ? hi : std::pow(10.0, l0 + (l1 - l0) * i / (points - 1)));
      break;
    }
    case Kind::kLinear: {
      if (!(step > 0.0) || !(stop >= start)) throw ConfigError("linear grid needs step > 0 and stop ≥ start");
      const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
      // Round to the step's decimal resolution so 0.1 + 0.05·k prints cleanly.
      for (long i = 0; i < count; ++i) g.push_back(std::round((start + step * i) * 1e12) / 1e12);
      break;
    }
  }
  if (g.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(g[i])) throw ConfigError("sweep grid contains a non-finite value");
    if (i > 0 && !(g[i] > g[i - 1])) throw ConfigError("sweep grid must be strictly increasing");
  }
  return g;
}

// ---- Linear ---------------------------------------------------------------

LinearSweepConfig LinearSweepConfig::defaults() {
  LinearSweepConfig c;
  c.A.resize(2, 2);
  c.A << 1.0, 1.0, -3.0, 1.0;
  c.B.resize(2, 1);
  c.B << 1.0, 3.0;
  c.Q = Mat::Identity(2, 2);
  c.Qf = Mat::Identity(2, 2);
  c.R = Mat::Identity(1, 1);
  c.x0 = Vec::Constant(2, 0.1);
  c.horizon = 10;
  c.grid.kind = GridSpec::Kind::kLog;
  c.grid.min = 1e-4;
  c.grid.points = 40;
  c.grid.max_is_cap = true;
  return c;
}

TimeVaryingLinearSystem linear_sweep_system(const LinearSweepConfig& config) {
  return TimeVaryingLinearSystem::time_invariant(config.A, config.B, config.horizon);
}

ApproximateModel linear_sweep_model(const LinearSweepConfig& config, double eps,
                                    bool first_step_only) {
  const auto sys = linear_sweep_system(config);
  auto Ahat = sys.A();
  auto Bhat = sys.B();
  const int last = first_step_only ? 1 : sys.horizon();
  for (int t = 0; t < last; ++t) {
    const auto ts = static_cast<std::size_t>(t);
    Ahat[ts] += eps * Mat::Identity(sys.state_dim(), sys.state_dim());
    Bhat[ts](0, 0) += eps;
  }
  return ApproximateModel::measured(sys, std::move(Ahat), std::move(Bhat));
}

double linear_sweep_cap(const LinearSweepConfig& config) {
  return min_singular_value(config.B.transpose() * config.B) / spectral_norm(config.B);
}

SweepTable run_linear_sweep(const LinearSweepConfig& config, int jobs) {
  const auto sys = linear_sweep_system(config);
  const QuadraticCost cost{config.Q, config.Qf, config.R};
  validate_shapes(sys, cost);
  if (config.x0.size() != sys.state_dim()) throw ConfigError("x0 has the wrong dimension");
  const double cap = linear_sweep_cap(config);
  const auto grid = config.grid.resolve(cap);
  if (grid.front() < 0.0) throw ConfigError("ε grid must be nonnegative");
  if (grid.back() > cap * (1.0 + 1e-12))
    throw ConfigError("ε grid exceeds the Assumption-3 cap " + fmt_double(cap));

  const auto [K_star, P_star] = solve_riccati_optimal(sys, cost);
  const double cost_opt = rollout_linear(sys, cost, K_star, config.x0).cost;

  SweepTable table;
  table.rows.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const double eps = grid[i];
    const auto model = linear_sweep_model(config, eps);

    SweepRow row;
    row.param = eps;
    row.cost_opt = cost_opt;

    const auto [K_mm, P_mm] = synthesize_mm(model, cost);
    bool div = false;
    row.cost_mm = capped(rollout_linear(sys, cost, K_mm, config.x0).cost, div);
    if (div) row.flag_mm = RowFlag::kDiverged;

    try {
      const auto ilc = synthesize_ilc_closed_form(sys, model, cost);
      div = false;
      row.cost_ilc = capped(rollout_linear(sys, cost, ilc.K, config.x0).cost, div);
      if (div) row.flag_ilc = RowFlag::kDiverged;
    } catch (const NonconvexSubproblem&) {
      row.cost_ilc = kSentinelCost;
      row.flag_ilc = RowFlag::kAssumptionViolated;
    } catch (const SynthesisFailure&) {
      row.cost_ilc = kSentinelCost;
      row.flag_ilc = RowFlag::kDiverged;
    }
    finish_gaps(row);
    table.rows[i] = row;
  });
  return table;
}

// ---- Nonlinear sweeps -----------------------------------------------------------

namespace {

// Optimal = best iLQR result on the true dynamics over three starts: the
// default initialization and warm starts from the MM and ILC controls. A
// warm start never ends above its starting cost, so gaps are nonnegative.
void nonlinear_point(const NonlinearSystem& truth, const NonlinearSystem& model,
                     const RunningCost& cost, const Vec& x0, const std::vector<Vec>& u_init,
                     const IlqrOptions& opts, SweepRow& row, SweepDiagnostics& diag) {
  const auto safe_ilqr = [&](const NonlinearSystem& fwd, const NonlinearSystem& bwd,
                             std::vector<Vec> u0) {
    try {
      return ilqr(fwd, bwd, cost, x0, std::move(u0), opts);
    } catch (const SynthesisFailure&) {
      IlqrResult r;
      r.stop = IlqrStop::kDiverged;
      r.diverged = true;
      return r;
    }
  };

  const auto opt = safe_ilqr(truth, truth, u_init);
  const auto mm = safe_ilqr(model, model, u_init);
  const auto ilc = safe_ilqr(truth, model, u_init);

  // MM controls are replayed open loop on the true system.
  Rollout mm_true;
  if (!mm.diverged) mm_true = simulate(truth, cost, x0, mm.u);
  row.cost_mm = mm_true.cost;
  row.flag_mm = mm_true.diverged ? RowFlag::kDiverged
                : !mm.converged() ? RowFlag::kNonconverged
                                  : RowFlag::kOk;
  row.cost_ilc = ilc.diverged ? kSentinelCost : ilc.cost;
  row.flag_ilc = ilc.diverged ? RowFlag::kDiverged
                 : !ilc.converged() ? RowFlag::kNonconverged
                                    : RowFlag::kOk;

  double best = opt.diverged ? kSentinelCost : opt.cost;
  if (!mm_true.diverged) best = std::min(best, safe_ilqr(truth, truth, mm.u).cost);
  if (!ilc.diverged) best = std::min(best, safe_ilqr(truth, truth, ilc.u).cost);
  row.cost_opt = best;
  finish_gaps(row);

  diag.param = row.param;
  diag.cost_opt_cold = opt.diverged ? kSentinelCost : opt.cost;
  diag.cost_mm_feedback =
      mm.diverged || mm.K.empty() ? kSentinelCost
                                  : simulate_feedback(truth, cost, x0, mm.u, mm.x, mm.K).cost;
  diag.iters_opt = opt.iterations;
  diag.iters_mm = mm.iterations;
  diag.iters_ilc = ilc.iterations;
  diag.stop_opt = opt.stop;
  diag.stop_mm = mm.stop;
  diag.stop_ilc = ilc.stop;
}

}  // namespace

PendulumSweepConfig PendulumSweepConfig::defaults() {
  PendulumSweepConfig c;
  c.x0.resize(2);
  c.x0 << std::numbers::pi / 2.0, 0.5;
  c.grid.kind = GridSpec::Kind::kLinear;
  c.grid.start = 0.0;
  c.grid.stop = 0.3;
  c.grid.step = 0.01;
  return c;
}

SweepTable run_pendulum_sweep(const PendulumSweepConfig& config, int jobs) {
  const auto grid = config.grid.resolve();
  if (config.x0.size() != 2) throw ConfigError("pendulum x0 must have two entries");
  const auto truth = pendulum_system(config.params);
  const auto cost = pendulum_cost(config.torque_weight);
  const std::vector<Vec> u_init(static_cast<std::size_t>(config.params.horizon), Vec::Zero(1));

  SweepTable table;
  table.rows.resize(grid.size());
  table.diagnostics.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    PendulumParams mp = config.params;
    mp.m += grid[i];
    if (!(mp.m > 0.0)) throw ConfigError("perturbed pendulum mass must stay positive");
    table.rows[i].param = grid[i];
    nonlinear_point(truth, pendulum_system(mp), cost, config.x0, u_init, config.ilqr,
                    table.rows[i], table.diagnostics[i]);
  });
  return table;
}

QuadrotorSweepConfig QuadrotorSweepConfig::defaults() {
  QuadrotorSweepConfig c;
  c.Q = Mat::Identity(6, 6);
  c.R = 0.1 * Mat::Identity(2, 2);
  c.Qf = Mat::Identity(6, 6);
  c.x0 = Vec::Zero(6);
  c.x0(0) = -3.0;
  c.x0(1) = 1.0;
  c.x_goal = Vec::Zero(6);
  c.x_goal(0) = 3.0;
  c.x_goal(1) = 1.0;
  c.grid.kind = GridSpec::Kind::kLinear;
  c.grid.start = 0.0;
  c.grid.stop = 15.0;
  c.grid.step = 0.5;
  return c;
}

SweepTable run_quadrotor_sweep(const QuadrotorSweepConfig& config, int jobs) {
  const auto grid = config.grid.resolve();
  if (grid.front() < 0.0) throw ConfigError("wind magnitudes must be nonnegative");
  if (config.x0.size() != 6 || config.x_goal.size() != 6)
    throw ConfigError("quadrotor x0 and goal must have six entries");
  QuadrotorParams model_params = config.params;
  model_params.eta = 0.0;
  const auto model = quadrotor_system(model_params);
  const double hover = config.params.m * config.params.g / 2.0;
  const Vec u_hover = Vec::Constant(2, hover);
  const auto cost = quadrotor_cost(config.Q, config.R, config.Qf, config.x_goal, u_hover);
  const std::vector<Vec> u_init(static_cast<std::size_t>(config.params.horizon), u_hover);

  SweepTable table;
  table.rows.resize(grid.size());
  table.diagnostics.resize(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    QuadrotorParams tp = config.params;
    tp.eta = grid[i];
    table.rows[i].param = grid[i];
    nonlinear_point(quadrotor_system(tp), model, cost, config.x0, u_init, config.ilqr,
                    table.rows[i], table.diagnostics[i]);
  });
  return table;
}

// ---- Bound suite ------------------------------------------------------------------

namespace {

void renamed(std::vector<BoundReport>& out, BoundReport rep, const std::string& suffix) {
  rep.name += suffix;
  out.push_back(std::move(rep));
}

// Compares ‖P*_t − P̂_t‖ with the unrolled recursion f_t. Entries count only
// where the one-step bound applies from t to H.
BoundReport chain_report(ControllerKind kind, const TimeVaryingLinearSystem& sys,
                         const QuadraticCost& cost, const ApproximateModel& approx,
                         const CostToGoSchedule& P_star, const CostToGoSchedule& P_hat,
                         const BoundReport& one_step) {
  BoundReport rep;
  rep.name = std::string("riccati_chain_") + to_string(kind);
  const auto f = chained_riccati_bound(kind, sys, cost, approx, P_star, P_hat);
  bool ok = true;
  for (int t = sys.horizon() - 1; t >= 0; --t) {
    ok = ok && one_step.entries[static_cast<std::size_t>(t)].preconditions_met;
    rep.entries.push_back({spectral_norm(P_star[t] - P_hat[t]), f[static_cast<std::size_t>(t)], ok});
  }
  return rep;
}

void instance_reports(const TimeVaryingLinearSystem& sys, const QuadraticCost& cost,
                      const ApproximateModel& approx, const Vec& x0,
                      std::vector<BoundReport>& out) {
  const auto [K_star, P_star] = solve_riccati_optimal(sys, cost);
  const auto [K_mm, P_mm] = synthesize_mm(approx, cost);

  renamed(out, theorem1_bound(sys, cost, x0, K_star, P_star, K_mm), "_mm");
  renamed(out, stability_lemma_check(sys, K_star, K_mm), "_mm");
  renamed(out, performance_difference_check(sys, cost, x0, K_star, P_star, K_mm), "_mm");
  auto ric_mm = riccati_bound_mm(sys, cost, approx, P_star, P_mm);
  out.push_back(chain_report(ControllerKind::kMisspecified, sys, cost, approx, P_star, P_mm, ric_mm));
  out.push_back(std::move(ric_mm));
  out.push_back(gain_diff_bound(ControllerKind::kMisspecified, sys, cost, approx, K_star, P_star,
                                K_mm, P_mm));

  IlcSynthesis ilc;
  try {
    ilc = synthesize_ilc_closed_form(sys, approx, cost);
  } catch (const NonconvexSubproblem&) {
    return;  // ILC bounds need Assumption 3
  }
  renamed(out, theorem1_bound(sys, cost, x0, K_star, P_star, ilc.K), "_ilc");
  renamed(out, stability_lemma_check(sys, K_star, ilc.K), "_ilc");
  renamed(out, performance_difference_check(sys, cost, x0, K_star, P_star, ilc.K), "_ilc");
  auto ric_ilc = riccati_bound_ilc(sys, cost, approx, P_star, ilc.P);
  out.push_back(chain_report(ControllerKind::kIlc, sys, cost, approx, P_star, ilc.P, ric_ilc));
  out.push_back(std::move(ric_ilc));
  out.push_back(gain_diff_bound(ControllerKind::kIlc, sys, cost, approx, K_star, P_star, ilc.K,
                                ilc.P));
}

}  // namespace

int BoundSuiteResult::total_violations() const {
  int v = 0;
  for (const auto& [name, t] : tallies) v += t.violations;
  return v;
}

BoundSuiteResult run_bound_suite(const BoundSuiteConfig& config, int jobs) {
  if (config.systems < 0 || config.lemma_trials < 1 || config.lemma_max_dim < 1 ||
      config.max_state_dim < 1 || config.max_horizon < 1 || !(config.rhs_scale > 0.0) ||
      !(config.eps_lo > 0.0 && config.eps_lo <= config.eps_hi))
    throw ConfigError("invalid bound-suite configuration");

  std::vector<std::vector<BoundReport>> slots(static_cast<std::size_t>(config.systems) + 3);

  parallel_for(static_cast<std::size_t>(config.systems), jobs, [&](std::size_t i) {
    std::seed_seq seq{static_cast<std::uint64_t>(config.seed), static_cast<std::uint64_t>(i)};
    std::mt19937_64 rng(seq);
    const auto inst = random_instance(rng, {config.max_state_dim, config.max_horizon, 0.9});
    const auto approx = random_perturbation(rng, inst.sys, config.eps_lo, config.eps_hi);
    instance_reports(inst.sys, inst.cost, approx, inst.x0, slots[i]);
  });

  // The two-state example system with the same perturbation family as the
  // linear sweep.
  auto& fixed = slots[static_cast<std::size_t>(config.systems)];
  const auto lin = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(lin);
  const QuadraticCost cost{lin.Q, lin.Qf, lin.R};
  std::vector<ApproximateModel> first_step;
  for (double eps : config.example_eps) {
    instance_reports(sys, cost, linear_sweep_model(lin, eps), lin.x0, fixed);
    first_step.push_back(linear_sweep_model(lin, eps, /*first_step_only=*/true));
  }
  if (!first_step.empty()) fixed.push_back(first_step_sweep(sys, cost, first_step, lin.x0));

  auto& scalar = slots[static_cast<std::size_t>(config.systems) + 1];
  for (double ea : {0.05, 0.1, 0.2})
    for (int H : {2, 5, 10}) scalar.push_back(scalar_tightness(1.0, 1.0, 1.0, 1.0, ea, H));

  slots.back().push_back(matrix_lemma_checks(config.lemma_trials, config.lemma_max_dim, config.seed));

  BoundSuiteResult result;
  for (const auto& group : slots) {
    for (const auto& rep : group) {
      auto& tally = result.tallies[rep.name];
      ++tally.reports;
      for (const auto& e : rep.entries) {
        ++tally.entries;
        if (!e.preconditions_met) continue;
        ++tally.applicable;
        const double rhs = config.rhs_scale * e.rhs;
        if (!(e.lhs <= rhs + kBoundSlack * (1.0 + std::abs(rhs)))) ++tally.violations;
        if (rhs > 0.0) tally.max_ratio = std::max(tally.max_ratio, e.lhs / rhs);
      }
    }
  }
  return result;
}

// ---- Output -------------------------------------------------------------------

void write_sweep_csv(std::ostream& os, const SweepTable& table) {
  os << "param,cost_opt,cost_mm,cost_ilc,gap_mm,gap_ilc,flag_mm,flag_ilc\n";
  for (const auto& r : table.rows) {
    os << fmt_double(r.param) << ',' << fmt_double(r.cost_opt) << ',' << fmt_double(r.cost_mm)
       << ',' << fmt_double(r.cost_ilc) << ',' << fmt_double(r.gap_mm) << ','
       << fmt_double(r.gap_ilc) << ',' << to_string(r.flag_mm) << ',' << to_string(r.flag_ilc)
       << '\n';
  }
}

void write_diagnostics_csv(std::ostream& os, const SweepTable& table) {
  os << "param,cost_opt_cold,cost_mm_feedback,iters_opt,iters_mm,iters_ilc,stop_opt,stop_mm,"
        "stop_ilc\n";
  for (const auto& d : table.diagnostics) {
    os << fmt_double(d.param) << ',' << fmt_double(d.cost_opt_cold) << ','
       << fmt_double(d.cost_mm_feedback) << ',' << d.iters_opt << ',' << d.iters_mm << ','
       << d.iters_ilc << ',' << to_string(d.stop_opt) << ',' << to_string(d.stop_mm) << ','
       << to_string(d.stop_ilc) << '\n';
  }
}

void write_bound_summary_csv(std::ostream& os, const BoundSuiteResult& result) {
  os << "bound,reports,entries,applicable,violations,max_ratio\n";
  for (const auto& [name, t] : result.tallies) {
    os << name << ',' << t.reports << ',' << t.entries << ',' << t.applicable << ','
       << t.violations << ',' << fmt_double(t.max_ratio) << '\n';
  }
}

void write_sweep_svg(std::ostream& os, const SweepTable& table, const std::string& title,
                     const std::string& x_label, bool log_axes) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  std::vector<double> xs, ys;
  for (const auto& r : table.rows) {
    xs.push_back(r.param);
    ys.push_back(r.gap_mm);
    ys.push_back(r.gap_ilc);
  }
  const auto tx = [log_axes](double v, double floor) {
    return log_axes ? std::log10(std::max(v, floor)) : v;
  };
  double xfloor = 0.0, yfloor = 0.0;
  if (log_axes) {
    xfloor = yfloor = std::numeric_limits<double>::infinity();
    for (double v : xs) if (v > 0.0) xfloor = std::min(xfloor, v);
    for (double v : ys) if (v > 0.0) yfloor = std::min(yfloor, v);
    if (!std::isfinite(xfloor)) xfloor = 1.0;
    if (!std::isfinite(yfloor)) yfloor = 1.0;
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!xs.empty()) {
    x0 = x1 = tx(xs.front(), xfloor);
    for (double v : xs) { x0 = std::min(x0, tx(v, xfloor)); x1 = std::max(x1, tx(v, xfloor)); }
    y0 = y1 = tx(ys.front(), yfloor);
    for (double v : ys) { y0 = std::min(y0, tx(v, yfloor)); y1 = std::max(y1, tx(v, yfloor)); }
  }
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  const auto px = [&](double v) { return L + (tx(v, xfloor) - x0) / (x1 - x0) * (W - L - R); };
  const auto py = [&](double v) { return H - B - (tx(v, yfloor) - y0) / (y1 - y0) * (H - T - B); };
  const auto label = [&](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", log_axes ? std::pow(10.0, v) : v);
    return std::string(buf);
  };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n"
     << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n"
     << "<text x=\"" << L << "\" y=\"" << H - B + 16 << "\">" << label(x0) << "</text>\n"
     << "<text x=\"" << W - R << "\" y=\"" << H - B + 16 << "\" text-anchor=\"end\">" << label(x1)
     << "</text>\n"
     << "<text x=\"" << L - 4 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << label(y0)
     << "</text>\n"
     << "<text x=\"" << L - 4 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\">" << label(y1)
     << "</text>\n"
     << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label
     << "</text>\n"
     << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\">suboptimality gap</text>\n";

  const auto polyline = [&](const char* color, auto gap) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& r : table.rows) os << px(r.param) << ',' << py(gap(r)) << ' ';
    os << "\"/>\n";
  };
  polyline("#d62728", [](const SweepRow& r) { return r.gap_mm; });
  polyline("#1f77b4", [](const SweepRow& r) { return r.gap_ilc; });
  os << "<text x=\"" << L + 10 << "\" y=\"" << T + 12 << "\" fill=\"#d62728\">MM</text>\n"
     << "<text x=\"" << L + 10 << "\" y=\"" << T + 28 << "\" fill=\"#1f77b4\">ILC</text>\n"
     << "</svg>\n";
}

void write_file(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path);
  }
}

}  // namespace ilcgap
