// Sweep and bound-verification driver.
//
// Exit codes: 0 success, 1 invalid config, 2 bound violation, 3 I/O error.

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include "ilcgap/config.hpp"
#include "ilcgap/errors.hpp"
#include "ilcgap/experiments.hpp"

namespace {

using namespace ilcgap;

struct CommonArgs {
  std::string config;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 1;
  bool plot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "INI config file (defaults when omitted)");
  cmd->add_option("--out", args.out, "output directory")->capture_default_str();
  cmd->add_option("--seed", args.seed, "random seed")->each([&args](const std::string&) {
    args.seed_given = true;
  });
  cmd->add_option("--jobs", args.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_flag("--plot", args.plot, "also write an SVG plot");
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) throw IoError("cannot create output directory " + args.out);
  return (std::filesystem::path(args.out) / name).string();
}

void emit(const CommonArgs& args, const SweepTable& table, const std::string& stem,
          const std::string& title, const std::string& x_label, bool log_axes) {
  std::ostringstream csv;
  write_sweep_csv(csv, table);
  write_file(out_path(args, stem + ".csv"), csv.str());
  if (!table.diagnostics.empty()) {
    std::ostringstream diag;
    write_diagnostics_csv(diag, table);
    write_file(out_path(args, stem + "_diagnostics.csv"), diag.str());
  }
  if (args.plot) {
    std::ostringstream svg;
    write_sweep_svg(svg, table, title, x_label, log_axes);
    write_file(out_path(args, stem + ".svg"), svg.str());
  }
  int flagged = 0;
  for (const auto& r : table.rows)
    if (r.flag_mm != RowFlag::kOk || r.flag_ilc != RowFlag::kOk) ++flagged;
  std::cout << stem << ": " << table.rows.size() << " points, " << flagged << " flagged, written to "
            << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal, misspecified-model and ILC controller sweeps and bound verification"};
  app.require_subcommand(1);

  CommonArgs linear_args, pendulum_args, quad_args, bound_args;
  bool self_test = false;
  auto* linear = app.add_subcommand("linear-sweep", "cost gaps on the two-state linear system");
  auto* pendulum = app.add_subcommand("pendulum-sweep", "cost gaps on the pendulum with mass error");
  auto* quad = app.add_subcommand("quadrotor-sweep", "cost gaps on the planar quadrotor in wind");
  auto* bounds = app.add_subcommand("verify-bounds", "check every bound on seeded random systems");
  add_common(linear, linear_args);
  add_common(pendulum, pendulum_args);
  add_common(quad, quad_args);
  add_common(bounds, bound_args);
  bounds->add_flag("--self-test", self_test, "halve every bound value; violations must appear");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (linear->parsed()) {
      const auto cfg = load_linear_config(linear_args.config);
      emit(linear_args, run_linear_sweep(cfg, linear_args.jobs), "linear_sweep",
           "Linear system: suboptimality gap vs model error", "epsilon", true);
    } else if (pendulum->parsed()) {
      const auto cfg = load_pendulum_config(pendulum_args.config);
      emit(pendulum_args, run_pendulum_sweep(cfg, pendulum_args.jobs), "pendulum_sweep",
           "Pendulum: suboptimality gap vs mass error", "delta m", false);
    } else if (quad->parsed()) {
      const auto cfg = load_quadrotor_config(quad_args.config);
      emit(quad_args, run_quadrotor_sweep(cfg, quad_args.jobs), "quadrotor_sweep",
           "Planar quadrotor: suboptimality gap vs wind", "eta", false);
    } else if (bounds->parsed()) {
      auto cfg = load_bound_config(bound_args.config);
      if (bound_args.seed_given) cfg.seed = bound_args.seed;
      if (self_test) cfg.rhs_scale = 0.5;
      const auto result = run_bound_suite(cfg, bound_args.jobs);
      std::ostringstream csv;
      write_bound_summary_csv(csv, result);
      write_file(out_path(bound_args, "bound_summary.csv"), csv.str());
      std::cout << csv.str();
      const int violations = result.total_violations();
      std::cout << "total violations: " << violations << "\n";
      if (self_test) return violations > 0 ? 0 : 2;
      return violations == 0 ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
