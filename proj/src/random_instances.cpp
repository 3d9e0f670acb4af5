#include "ilcgap/random_instances.hpp"

#include <cmath>

#include "ilcgap/errors.hpp"

namespace ilcgap {

namespace {

Mat gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

Mat unit_direction(std::mt19937_64& rng, int rows, int cols) {
  Mat m = gaussian(rng, rows, cols);
  const double s = spectral_norm(m);
  return s > 0.0 ? Mat(m / s) : m;
}

}  // namespace

Mat random_spd(std::mt19937_64& rng, int dim, double lo, double hi) {
  std::uniform_real_distribution<double> ev(lo, hi);
  const Eigen::HouseholderQR<Mat> qr(gaussian(rng, dim, dim));
  const Mat U = qr.householderQ();
  Vec d(dim);
  for (int i = 0; i < dim; ++i) d(i) = ev(rng);
  return symmetrized(U * d.asDiagonal() * U.transpose());
}

LqrInstance random_instance(std::mt19937_64& rng, const InstanceShape& shape) {
  if (shape.max_state_dim < 1 || shape.max_horizon < 1 || !(shape.max_A_norm > 0.0))
    throw InvalidInput("instance shape needs positive dimensions, horizon and norm cap");
  std::uniform_int_distribution<int> n_dist(1, shape.max_state_dim);
  std::uniform_int_distribution<int> h_dist(1, shape.max_horizon);
  std::uniform_real_distribution<double> a_scale(0.2, shape.max_A_norm);

  for (;;) {
    const int n = n_dist(rng);
    const int d = std::uniform_int_distribution<int>(1, n)(rng);
    const int H = h_dist(rng);
    std::vector<Mat> A, B;
    for (int t = 0; t < H; ++t) {
      A.push_back(a_scale(rng) * unit_direction(rng, n, n));
      B.push_back(gaussian(rng, n, d));
    }
    TimeVaryingLinearSystem sys(std::move(A), std::move(B));
    QuadraticCost cost{random_spd(rng, n, 0.5, 2.0), random_spd(rng, n, 0.5, 2.0),
                       random_spd(rng, d, 1.0, 2.0)};
    Vec x0 = gaussian(rng, n, 1);
    const auto [K, P] = solve_riccati_optimal(sys, cost);
    if (stability_certificate(sys, K).valid())
      return {std::move(sys), std::move(cost), std::move(x0)};
  }
}

ApproximateModel random_perturbation(std::mt19937_64& rng, const TimeVaryingLinearSystem& sys,
                                     double eps_lo, double eps_hi) {
  if (!(eps_lo > 0.0 && eps_lo <= eps_hi)) throw InvalidInput("need 0 < eps_lo <= eps_hi");
  std::uniform_real_distribution<double> log_eps(std::log(eps_lo), std::log(eps_hi));
  const double ea = std::exp(log_eps(rng));
  const double eb = std::exp(log_eps(rng));
  std::vector<Mat> Ahat, Bhat;
  for (int t = 0; t < sys.horizon(); ++t) {
    Ahat.push_back(sys.A(t) + ea * unit_direction(rng, sys.state_dim(), sys.state_dim()));
    Bhat.push_back(sys.B(t) + eb * unit_direction(rng, sys.state_dim(), sys.control_dim()));
  }
  return ApproximateModel::measured(sys, std::move(Ahat), std::move(Bhat));
}

}  // namespace ilcgap
