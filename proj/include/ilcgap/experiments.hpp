#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ilcgap/bounds.hpp"
#include "ilcgap/lqr_core.hpp"
#include "ilcgap/nonlinear.hpp"

namespace ilcgap {

enum class RowFlag { kOk, kDiverged, kAssumptionViolated, kNonconverged };

const char* to_string(RowFlag flag);

struct SweepRow {
  double param = 0.0;
  double cost_opt = 0.0;
  double cost_mm = 0.0;
  double cost_ilc = 0.0;
  double gap_mm = 0.0;
  double gap_ilc = 0.0;
  RowFlag flag_mm = RowFlag::kOk;
  RowFlag flag_ilc = RowFlag::kOk;
};

/// Extra per-point numbers for the nonlinear sweeps that do not belong in
/// the main table.
struct SweepDiagnostics {
  double param = 0.0;
  double cost_mm_feedback = 0.0;  // MM controls with their iLQR gains, on the true system
  double cost_opt_cold = 0.0;     // iLQR on the true system from the default initialization
  int iters_opt = 0;
  int iters_mm = 0;
  int iters_ilc = 0;
  IlqrStop stop_opt = IlqrStop::kMaxIters;
  IlqrStop stop_mm = IlqrStop::kMaxIters;
  IlqrStop stop_ilc = IlqrStop::kMaxIters;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepDiagnostics> diagnostics;  // empty for the linear sweep
};

/// Either an explicit list or a generated grid. Generated grids are
/// log-spaced (`points` values between `min` and `max`) or linear
/// (`start`, `stop`, `step`).
struct GridSpec {
  std::vector<double> values;
  enum class Kind { kExplicit, kLog, kLinear } kind = Kind::kExplicit;
  double min = 0.0, max = 0.0;
  int points = 0;
  double start = 0.0, stop = 0.0, step = 0.0;
  bool max_is_cap = false;  // log grid up to the Assumption-3 cap

  /// Throws ConfigError unless the result is nonempty and strictly increasing.
  std::vector<double> resolve(double cap = 0.0) const;
};

struct LinearSweepConfig {
  Mat A, B, Q, Qf, R;
  Vec x0;
  int horizon = 10;
  GridSpec grid;

  static LinearSweepConfig defaults();
};

struct PendulumSweepConfig {
  PendulumParams params;
  Vec x0;
  double torque_weight = 0.1;
  IlqrOptions ilqr;
  GridSpec grid;

  static PendulumSweepConfig defaults();
};

struct QuadrotorSweepConfig {
  QuadrotorParams params;
  Mat Q, R, Qf;
  Vec x0, x_goal;
  IlqrOptions ilqr;
  GridSpec grid;

  static QuadrotorSweepConfig defaults();
};

struct BoundSuiteConfig {
  int systems = 200;
  int max_state_dim = 4;
  int max_horizon = 15;
  double eps_lo = 1e-4;
  double eps_hi = 1e-1;
  int lemma_trials = 1000;
  int lemma_max_dim = 5;
  std::vector<double> example_eps{0.01, 0.05, 0.1};
  /// Multiplies every bound value before checking; 0.5 is the harness self-test.
  double rhs_scale = 1.0;
  std::uint64_t seed = 0;
};

TimeVaryingLinearSystem linear_sweep_system(const LinearSweepConfig& config);

/// Â_t = A + εI and B̂_t = B + εe₁ for every t, or only for t = 0 when
/// `first_step_only`.
ApproximateModel linear_sweep_model(const LinearSweepConfig& config, double eps,
                                    bool first_step_only = false);

/// Â = A + εI, B̂ = B + εe₁ per grid point with closed-form controllers.
/// Throws ConfigError if the grid exceeds the Assumption-3 cap.
SweepTable run_linear_sweep(const LinearSweepConfig& config, int jobs = 1);

/// m̂ = m + Δm per grid point; optimal, MM and ILC by iLQR.
SweepTable run_pendulum_sweep(const PendulumSweepConfig& config, int jobs = 1);

/// Model without wind, true system with wind η per grid point.
SweepTable run_quadrotor_sweep(const QuadrotorSweepConfig& config, int jobs = 1);

/// Assumption-3 cap σ_min(BᵀB)/‖B‖ of the linear experiment (R is scalar there).
double linear_sweep_cap(const LinearSweepConfig& config);

struct BoundTally {
  int reports = 0;
  int entries = 0;
  int applicable = 0;
  int violations = 0;
  double max_ratio = 0.0;  // max lhs/rhs over applicable entries with rhs > 0
};

struct BoundSuiteResult {
  std::map<std::string, BoundTally> tallies;
  int total_violations() const;
};

BoundSuiteResult run_bound_suite(const BoundSuiteConfig& config, int jobs = 1);

/// `param,cost_opt,cost_mm,cost_ilc,gap_mm,gap_ilc,flag_mm,flag_ilc`, %.17g.
void write_sweep_csv(std::ostream& os, const SweepTable& table);
void write_diagnostics_csv(std::ostream& os, const SweepTable& table);
void write_bound_summary_csv(std::ostream& os, const BoundSuiteResult& result);

/// Gap curves as SVG; log-log axes when `log_axes`, nonpositive values
/// clipped to the smallest positive one.
void write_sweep_svg(std::ostream& os, const SweepTable& table, const std::string& title,
                     const std::string& x_label, bool log_axes);

/// Writes via a temporary file; throws IoError if the path is not writable.
void write_file(const std::string& path, const std::string& contents);

}  // namespace ilcgap
