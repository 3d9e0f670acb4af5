#pragma once

#include <iosfwd>
#include <string>

#include "ilcgap/experiments.hpp"

namespace ilcgap {

// INI documents. Matrices are written row by row, rows separated by ';'
// and entries by spaces or commas ("1 1; -3 1"). Unknown sections or keys
// are rejected with ConfigError so typos do not silently fall back to
// defaults. A missing key keeps its default.
//
// Grids live in a [grid] section:
//   values = 0.01, 0.05, 0.1                 explicit list
//   kind = log,    min, max (or "cap"), points
//   kind = linear, start, stop, step

LinearSweepConfig parse_linear_config(std::istream& in);
PendulumSweepConfig parse_pendulum_config(std::istream& in);
QuadrotorSweepConfig parse_quadrotor_config(std::istream& in);
BoundSuiteConfig parse_bound_config(std::istream& in);

/// Empty path → defaults. Throws IoError if the file cannot be read.
LinearSweepConfig load_linear_config(const std::string& path);
PendulumSweepConfig load_pendulum_config(const std::string& path);
QuadrotorSweepConfig load_quadrotor_config(const std::string& path);
BoundSuiteConfig load_bound_config(const std::string& path);

/// "1 2; 3 4" → 2×2. Throws ConfigError on ragged rows or bad numbers.
Mat parse_matrix(const std::string& text);
Vec parse_vector(const std::string& text);

}  // namespace ilcgap
