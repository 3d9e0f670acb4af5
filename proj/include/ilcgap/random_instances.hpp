#pragma once

#include <cstdint>
#include <random>

#include "ilcgap/lqr_core.hpp"

namespace ilcgap {

struct LqrInstance {
  TimeVaryingLinearSystem sys;
  QuadraticCost cost;
  Vec x0;
};

struct InstanceShape {
  int max_state_dim = 4;
  int max_horizon = 20;
  double max_A_norm = 0.9;
};

/// Random time-varying instance satisfying Assumptions 1 and 2: n ≤ max_state_dim,
/// d ≤ n, H ≤ max_horizon, ‖A_t‖ ≤ max_A_norm, eig(Q), eig(Q_f) ∈ [0.5, 2],
/// eig(R) ∈ [1, 2]. Draws are rejected until the optimal closed loop
/// contracts at every step.
LqrInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape = {});

/// Symmetric matrix with eigenvalues uniform in [lo, hi].
Mat random_spd(std::mt19937_64& rng, int dim, double lo, double hi);

/// Â_t = A_t + ε_A E_t, B̂_t = B_t + ε_B F_t with unit-norm Gaussian
/// directions and ε_A, ε_B log-uniform in [eps_lo, eps_hi]. Error bounds
/// are the measured ones.
ApproximateModel random_perturbation(std::mt19937_64& rng, const TimeVaryingLinearSystem& sys,
                                     double eps_lo = 1e-4, double eps_hi = 1e-1);

}  // namespace ilcgap
