#include <gtest/gtest.h>

#include <random>

#include "ilcgap/errors.hpp"
#include "ilcgap/experiments.hpp"
#include "ilcgap/lqr_core.hpp"
#include "ilcgap/random_instances.hpp"
#include "oracles.hpp"

using namespace ilcgap;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

QuadraticCost scalar_cost(double q, double qf, double r) { return {scalar(q), scalar(qf), scalar(r)}; }

}  // namespace

TEST(LqrCore, ScalarOneStepByHand) {
  // a = b = q = r = q_f = 1, H = 1: p_0 = 1 + 1/(1+1), k_0 = −1/2.
  const auto sys = TimeVaryingLinearSystem::time_invariant(scalar(1), scalar(1), 1);
  const auto [K, P] = solve_riccati_optimal(sys, scalar_cost(1, 1, 1));
  EXPECT_NEAR(P[0](0, 0), 1.5, 1e-15);
  EXPECT_NEAR(P[1](0, 0), 1.0, 0.0);
  EXPECT_NEAR(K[0](0, 0), -0.5, 1e-15);
}

TEST(LqrCore, ZeroDynamicsGivesZeroGains) {
  const auto sys = TimeVaryingLinearSystem::time_invariant(Mat::Zero(2, 2), Mat::Zero(2, 1), 4);
  const QuadraticCost c{Mat::Identity(2, 2), 3.0 * Mat::Identity(2, 2), scalar(1)};
  const auto [K, P] = solve_riccati_optimal(sys, c);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(max_abs(K[t]), 0.0);
    EXPECT_LT(max_abs(P[t] - c.Q), 1e-15);
  }
  EXPECT_EQ(P[4], c.Qf);
}

TEST(LqrCore, MatchesStackedQuadraticProgram) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance(rng, {4, 12, 0.9});
    const auto [K, P] = solve_riccati_optimal(inst.sys, inst.cost);
    const double v = inst.x0.dot(P[0] * inst.x0);
    const double ref = oracle::optimal_cost(inst.sys, inst.cost, inst.x0);
    EXPECT_NEAR(v, ref, 1e-9 * std::max(1.0, ref)) << "trial " << trial;
    EXPECT_NEAR(rollout_linear(inst.sys, inst.cost, K, inst.x0).cost, v, 1e-10 * std::max(1.0, v));
  }
}

TEST(LqrCore, UnstableExampleSystemMatchesOracle) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  const QuadraticCost c{cfg.Q, cfg.Qf, cfg.R};
  const auto [K, P] = solve_riccati_optimal(sys, c);
  const double v = rollout_linear(sys, c, K, cfg.x0).cost;
  EXPECT_NEAR(v, oracle::optimal_cost(sys, c, cfg.x0), 1e-12);
  EXPECT_NEAR(v, cfg.x0.dot(P[0] * cfg.x0), 1e-14);
}

TEST(LqrCore, CostToGoIsSymmetricPositiveDefinite) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng);
    const auto [K, P] = solve_riccati_optimal(inst.sys, inst.cost);
    for (const auto& Pt : P.P) {
      EXPECT_EQ(max_abs(Pt - Pt.transpose()), 0.0);
      EXPECT_TRUE(is_positive_definite(Pt));
    }
  }
}

TEST(LqrCore, RejectsBadShapesAndIndefiniteCosts) {
  EXPECT_THROW(TimeVaryingLinearSystem({Mat::Identity(2, 2)}, {Mat::Zero(3, 1)}), InvalidInput);
  EXPECT_THROW(TimeVaryingLinearSystem({}, {}), InvalidInput);
  EXPECT_THROW(TimeVaryingLinearSystem({Mat::Identity(2, 3)}, {Mat::Zero(2, 1)}), InvalidInput);

  const auto sys = TimeVaryingLinearSystem::time_invariant(Mat::Identity(2, 2), Mat::Ones(2, 1), 3);
  EXPECT_THROW(solve_riccati_optimal(sys, {Mat::Identity(3, 3), Mat::Identity(3, 3), scalar(1)}),
               InvalidInput);
  EXPECT_THROW(solve_riccati_optimal(sys, {-Mat::Identity(2, 2), Mat::Identity(2, 2), scalar(1)}),
               InvalidInput);
  EXPECT_THROW(solve_riccati_optimal(sys, {Mat::Identity(2, 2), Mat::Identity(2, 2), scalar(0)}),
               InvalidInput);
}

TEST(LqrCore, OpenLoopAndClosedLoopRolloutsAgree) {
  std::mt19937_64 rng(5);
  const auto inst = random_instance(rng);
  const auto [K, P] = solve_riccati_optimal(inst.sys, inst.cost);
  const auto closed = rollout_linear(inst.sys, inst.cost, K, inst.x0);
  const auto open = rollout_open_loop(inst.sys, inst.cost, closed.u, inst.x0);
  EXPECT_NEAR(open.cost, closed.cost, 1e-13 * closed.cost);
  EXPECT_NEAR(trajectory_cost(inst.cost, closed.x, closed.u), closed.cost, 1e-13 * closed.cost);
  EXPECT_THROW(rollout_open_loop(inst.sys, inst.cost, {}, inst.x0), InvalidInput);
}

TEST(LqrCore, StabilityCertificateOnRandomInstances) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng);
    const auto [K, P] = solve_riccati_optimal(inst.sys, inst.cost);
    const auto cert = stability_certificate(inst.sys, K);
    ASSERT_TRUE(cert.valid());
    const auto prods = closed_loop_products(inst.sys, K);
    for (std::size_t t = 0; t < prods.size(); ++t)
      EXPECT_LE(prods[t], std::pow(1.0 - cert.delta, static_cast<double>(t + 1)) + 1e-12);
  }
}

TEST(LqrCore, ExampleSystemViolatesStabilityAssumption) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  const auto [K, P] = solve_riccati_optimal(sys, {cfg.Q, cfg.Qf, cfg.R});
  const auto rep = check_assumptions(sys, {cfg.Q, cfg.Qf, cfg.R}, K, linear_sweep_model(cfg, 0.01));
  EXPECT_TRUE(rep.assumption1);
  EXPECT_FALSE(rep.assumption2);
  EXPECT_GT(*std::max_element(rep.stability.per_step_norms.begin(), rep.stability.per_step_norms.end()),
            1.0);
  EXPECT_TRUE(rep.assumption3);
  EXPECT_NEAR(rep.eps_B_threshold, std::sqrt(10.0), 1e-12);
  EXPECT_TRUE(rep.sufficient_condition_met);
}

TEST(LqrCore, Assumption3DetectsFlippedInputMatrix) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  auto Bhat = sys.B();
  for (auto& b : Bhat) b = -b;
  const auto model = ApproximateModel::measured(sys, sys.A(), Bhat);
  const auto [K, P] = solve_riccati_optimal(sys, {cfg.Q, cfg.Qf, cfg.R});
  const auto rep = check_assumptions(sys, {cfg.Q, cfg.Qf, cfg.R}, K, model);
  EXPECT_FALSE(rep.assumption3);
  EXPECT_NEAR(rep.min_real_eigenvalue.front(), -10.0, 1e-12);
  EXPECT_FALSE(rep.sufficient_condition_met);
}

TEST(LqrCore, Assumption1NeedsUnitSingularValueOfR) {
  const auto sys = TimeVaryingLinearSystem::time_invariant(scalar(0.5), scalar(1), 3);
  const QuadraticCost c = scalar_cost(1, 1, 0.5);
  const auto [K, P] = solve_riccati_optimal(sys, c);
  const auto rep = check_assumptions(sys, c, K, ApproximateModel::exact(sys));
  EXPECT_TRUE(rep.r_pd);
  EXPECT_FALSE(rep.assumption1);
  EXPECT_NEAR(rep.r_min_singular, 0.5, 1e-15);
}

TEST(LqrCore, GammaIsOnePlusLargestNorm) {
  const auto sys = TimeVaryingLinearSystem::time_invariant(scalar(0.5), scalar(1), 2);
  const auto c = scalar_cost(1, 4, 1);
  const auto [K, P] = solve_riccati_optimal(sys, c);
  double m = 1.0;  // ‖B‖
  for (int t = 0; t <= 2; ++t) m = std::max(m, std::abs(P[t](0, 0)));
  for (int t = 0; t < 2; ++t) m = std::max(m, std::abs(K[t](0, 0)));
  EXPECT_DOUBLE_EQ(gamma_constant(sys, K, P), 1.0 + m);
  EXPECT_DOUBLE_EQ(gamma_constant(sys, K, P), 5.0);  // P_H = Q_f = 4 dominates
}

TEST(LqrCore, MeasuredModelRecomputesErrorBounds) {
  const auto sys = TimeVaryingLinearSystem::time_invariant(Mat::Identity(2, 2), Mat::Ones(2, 1), 3);
  auto Ahat = sys.A();
  Ahat[1] += 0.3 * Mat::Identity(2, 2);
  const auto m = ApproximateModel::measured(sys, Ahat, sys.B());
  EXPECT_NEAR(m.eps_A, 0.3, 1e-15);
  EXPECT_EQ(m.eps_B, 0.0);
  EXPECT_THROW(ApproximateModel::measured(sys, {Ahat[0]}, sys.B()), InvalidInput);
  const auto exact = ApproximateModel::exact(sys);
  EXPECT_EQ(exact.eps_A, 0.0);
  EXPECT_EQ(exact.horizon(), 3);
}
