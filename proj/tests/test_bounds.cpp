#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ilcgap/bounds.hpp"
#include "ilcgap/errors.hpp"
#include "ilcgap/experiments.hpp"
#include "ilcgap/model_mismatch.hpp"
#include "ilcgap/random_instances.hpp"
#include "oracles.hpp"

using namespace ilcgap;

namespace {

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

struct Solved {
  LqrInstance inst;
  ApproximateModel model;
  GainSchedule K_star;
  CostToGoSchedule P_star;
  GainSchedule K_mm;
  CostToGoSchedule P_mm;
};

Solved solved_instance(std::mt19937_64& rng, double eps_lo = 1e-4, double eps_hi = 1e-2) {
  auto inst = random_instance(rng, {4, 15, 0.9});
  auto model = random_perturbation(rng, inst.sys, eps_lo, eps_hi);
  auto [Ks, Ps] = solve_riccati_optimal(inst.sys, inst.cost);
  auto [Km, Pm] = synthesize_mm(model, inst.cost);
  return {std::move(inst), std::move(model), std::move(Ks), std::move(Ps), std::move(Km),
          std::move(Pm)};
}

// Model Â_0 = A_0 + εA E, B̂_0 = B_0 + εB F; identical to the system afterwards.
ApproximateModel first_step_model(const TimeVaryingLinearSystem& sys, double eps_a, double eps_b) {
  auto Ahat = sys.A();
  auto Bhat = sys.B();
  Ahat[0] += eps_a * Mat::Identity(sys.state_dim(), sys.state_dim());
  Bhat[0] += eps_b * Mat::Ones(sys.state_dim(), sys.control_dim()) /
             std::sqrt(static_cast<double>(sys.state_dim() * sys.control_dim()));
  return ApproximateModel::measured(sys, Ahat, Bhat);
}

}  // namespace

TEST(CostGapBound, IdenticalGainsGiveZeroOnBothSides) {
  std::mt19937_64 rng(1);
  const auto s = solved_instance(rng);
  const auto rep = theorem1_bound(s.inst.sys, s.inst.cost, s.inst.x0, s.K_star, s.P_star, s.K_star);
  ASSERT_EQ(rep.entries.size(), 1u);
  EXPECT_TRUE(rep.entries[0].preconditions_met);
  EXPECT_EQ(rep.entries[0].lhs, 0.0);
  EXPECT_EQ(rep.entries[0].rhs, 0.0);
  EXPECT_TRUE(rep.holds());
}

TEST(CostGapBound, HoldsOnRandomInstancesWithMisspecifiedGains) {
  std::mt19937_64 rng(2);
  int applicable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = solved_instance(rng);
    const auto rep = theorem1_bound(s.inst.sys, s.inst.cost, s.inst.x0, s.K_star, s.P_star, s.K_mm);
    applicable += rep.applicable();
    EXPECT_EQ(rep.violations(), 0) << "trial " << trial;
    EXPECT_GE(rep.entries[0].lhs, -1e-12);
  }
  EXPECT_GT(applicable, 40);
}

TEST(CostGapBound, BoundGrowsWithModelError) {
  std::mt19937_64 rng(3);
  const auto inst = random_instance(rng);
  const auto [K_star, P_star] = solve_riccati_optimal(inst.sys, inst.cost);
  double prev = -1.0;
  for (double eps : {1e-4, 1e-3, 1e-2}) {
    auto Ahat = inst.sys.A();
    for (auto& A : Ahat) A += eps * Mat::Identity(A.rows(), A.cols());
    const auto model = ApproximateModel::measured(inst.sys, Ahat, inst.sys.B());
    const auto [K_mm, P_mm] = synthesize_mm(model, inst.cost);
    const double rhs = theorem1_bound(inst.sys, inst.cost, inst.x0, K_star, P_star, K_mm).entries[0].rhs;
    EXPECT_GT(rhs, prev);
    prev = rhs;
  }
}

TEST(CostGapBound, NotApplicableWithoutStability) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  const QuadraticCost cost{cfg.Q, cfg.Qf, cfg.R};
  const auto [K_star, P_star] = solve_riccati_optimal(sys, cost);
  const auto [K_mm, P_mm] = synthesize_mm(linear_sweep_model(cfg, 0.01), cost);
  const auto rep = theorem1_bound(sys, cost, cfg.x0, K_star, P_star, K_mm);
  EXPECT_EQ(rep.applicable(), 0);
  EXPECT_EQ(rep.violations(), 0);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(StabilityLemma, ClosedLoopProductsDecayForNearbyGains) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = solved_instance(rng);
    const auto rep = stability_lemma_check(s.inst.sys, s.K_star, s.K_mm);
    EXPECT_EQ(rep.violations(), 0);
  }
}

TEST(PerformanceDifference, ScalarOneStepByHand) {
  // H = 1: V̂ − V* = (k̂ − k*)²(r + b²p₁)x0².
  const double a = 1.2, b = 0.7, q = 1.0, r = 1.5, qf = 2.0, x0 = 0.8;
  const auto sys = TimeVaryingLinearSystem::time_invariant(scalar(a), scalar(b), 1);
  const QuadraticCost cost{scalar(q), scalar(qf), scalar(r)};
  const auto [K_star, P_star] = solve_riccati_optimal(sys, cost);
  const double k_hat = K_star[0](0, 0) + 0.3;
  const GainSchedule K_hat{{scalar(k_hat)}};
  Vec x(1);
  x << x0;
  const auto rep = performance_difference_check(sys, cost, x, K_star, P_star, K_hat);
  const double expected = 0.09 * (r + b * b * qf) * x0 * x0;
  EXPECT_NEAR(rep.constants.at("cost_gap"), expected, 1e-14);
  EXPECT_NEAR(rep.constants.at("advantage_sum"), expected, 1e-14);
  EXPECT_TRUE(rep.holds());
}

TEST(PerformanceDifference, AdvantagesSumToGapOnRandomInstances) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = solved_instance(rng, 1e-3, 0.3);
    const auto rep = performance_difference_check(s.inst.sys, s.inst.cost, s.inst.x0, s.K_star,
                                                  s.P_star, s.K_mm);
    EXPECT_TRUE(rep.holds()) << "trial " << trial;
  }
}

TEST(PerformanceDifference, ExactModelHasZeroGap) {
  std::mt19937_64 rng(6);
  const auto inst = random_instance(rng);
  const auto [K_star, P_star] = solve_riccati_optimal(inst.sys, inst.cost);
  const auto rep = performance_difference_check(inst.sys, inst.cost, inst.x0, K_star, P_star, K_star);
  EXPECT_EQ(rep.constants.at("cost_gap"), 0.0);
  EXPECT_EQ(rep.constants.at("advantage_sum"), 0.0);
}

TEST(RiccatiPerturbation, ExactModelGivesZeroMeasuredGap) {
  std::mt19937_64 rng(7);
  const auto inst = random_instance(rng);
  const auto exact = ApproximateModel::exact(inst.sys);
  const auto [K_star, P_star] = solve_riccati_optimal(inst.sys, inst.cost);
  const auto ilc = synthesize_ilc_closed_form(inst.sys, exact, inst.cost);
  const auto mm = riccati_bound_mm(inst.sys, inst.cost, exact, P_star, P_star);
  const auto il = riccati_bound_ilc(inst.sys, inst.cost, exact, P_star, ilc.P);
  for (const auto& e : mm.entries) EXPECT_EQ(e.lhs, 0.0);
  for (const auto& e : il.entries) EXPECT_LT(e.lhs, 1e-12);
  EXPECT_TRUE(mm.holds());
  EXPECT_TRUE(il.holds());
}

TEST(RiccatiPerturbation, HoldsOnRandomInstances) {
  std::mt19937_64 rng(8);
  int applicable = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = solved_instance(rng);
    const auto mm = riccati_bound_mm(s.inst.sys, s.inst.cost, s.model, s.P_star, s.P_mm);
    EXPECT_EQ(mm.violations(), 0) << "trial " << trial;
    applicable += mm.applicable();
    try {
      const auto ilc = synthesize_ilc_closed_form(s.inst.sys, s.model, s.inst.cost);
      EXPECT_EQ(riccati_bound_ilc(s.inst.sys, s.inst.cost, s.model, s.P_star, ilc.P).violations(), 0);
    } catch (const NonconvexSubproblem&) {
    }
  }
  EXPECT_GT(applicable, 0);
}

TEST(RiccatiPerturbation, OneStepRightHandSidesAreMonotoneInError) {
  for (auto rhs : {&riccati_rhs_mm, &riccati_rhs_ilc}) {
    EXPECT_EQ(rhs(1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 3.0, 0.0), 0.0);
    double prev = 0.0;
    for (double eps : {1e-3, 1e-2, 1e-1}) {
      const double v = rhs(1.0, 2.0, 1.0, 1.0, eps, eps, 3.0, 0.0);
      EXPECT_GT(v, prev);
      prev = v;
    }
    EXPECT_GT(rhs(1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 3.0, 0.1), 0.0);
  }
}

TEST(RiccatiPerturbation, ChainedBoundDominatesMeasuredGaps) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = solved_instance(rng);
    const auto f =
        chained_riccati_bound(ControllerKind::kMisspecified, s.inst.sys, s.inst.cost, s.model,
                              s.P_star, s.P_mm);
    ASSERT_EQ(f.size(), static_cast<std::size_t>(s.inst.sys.horizon()) + 1);
    EXPECT_EQ(f.back(), 0.0);
    for (int t = 0; t <= s.inst.sys.horizon(); ++t) {
      const double gap = spectral_norm(s.P_star[t] - s.P_mm[t]);
      EXPECT_LE(gap, f[static_cast<std::size_t>(t)] * (1.0 + 1e-9) + 1e-12) << "t=" << t;
    }
  }
}

TEST(RiccatiPerturbation, ClosedFormConstantUndefinedForSmallCostToGo) {
  EXPECT_FALSE(closed_form_c(Mat::Identity(2, 2)).has_value());  // ‖P‖² = κ = 1
  Mat P = Mat::Identity(2, 2);
  P(0, 0) = 3.0;  // κ = 3, ‖P‖² = 9
  const auto c = closed_form_c(P);
  ASSERT_TRUE(c.has_value());
  EXPECT_NEAR(*c, 9.0 + 1.0 + 9.0 / 6.0 * (3.0 + 1.0 / 3.0), 1e-12);
}

TEST(GainGap, HoldsForBothControllersOnRandomInstances) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = solved_instance(rng);
    EXPECT_EQ(gain_diff_bound(ControllerKind::kMisspecified, s.inst.sys, s.inst.cost, s.model,
                              s.K_star, s.P_star, s.K_mm, s.P_mm)
                  .violations(),
              0);
    try {
      const auto ilc = synthesize_ilc_closed_form(s.inst.sys, s.model, s.inst.cost);
      EXPECT_EQ(gain_diff_bound(ControllerKind::kIlc, s.inst.sys, s.inst.cost, s.model, s.K_star,
                                s.P_star, ilc.K, ilc.P)
                    .violations(),
                0);
    } catch (const NonconvexSubproblem&) {
    }
  }
}

TEST(GainGap, RejectsWrongLengthBoundSequence) {
  std::mt19937_64 rng(11);
  const auto s = solved_instance(rng);
  EXPECT_THROW(gain_diff_bound(ControllerKind::kMisspecified, s.inst.sys, s.inst.cost, s.model,
                               s.K_star, s.P_star, s.K_mm, s.P_mm, std::vector<double>{0.0}),
               InvalidInput);
}

TEST(FirstStep, LaterCostToGoMatchesExactly) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  const QuadraticCost cost{cfg.Q, cfg.Qf, cfg.R};
  for (double eps : {0.01, 0.1, 0.5}) {
    const auto rep = first_step_error_bounds(sys, cost, linear_sweep_model(cfg, eps, true), cfg.x0);
    EXPECT_LE(rep.constants.at("tail_p_gap_mm"), 1e-12);
    EXPECT_LE(rep.constants.at("tail_p_gap_ilc"), 1e-12);
    EXPECT_LE(rep.constants.at("gap_ilc"), rep.constants.at("gap_mm"));
    EXPECT_EQ(rep.applicable(), 0);
  }
}

TEST(FirstStep, RejectsMismatchAfterTheFirstStep) {
  const auto cfg = LinearSweepConfig::defaults();
  const auto sys = linear_sweep_system(cfg);
  EXPECT_THROW(first_step_error_bounds(sys, {cfg.Q, cfg.Qf, cfg.R}, linear_sweep_model(cfg, 0.1),
                                       cfg.x0),
               InvalidInput);
}

TEST(FirstStep, CalibratedSweepScalesWithError) {
  std::mt19937_64 rng(12);
  const auto inst = random_instance(rng);
  std::vector<ApproximateModel> models;
  for (double e : {1e-3, 1e-2, 5e-2}) models.push_back(first_step_model(inst.sys, e, e));
  const auto rep = first_step_sweep(inst.sys, inst.cost, models, inst.x0);
  EXPECT_EQ(rep.entries.size(), 6u);
  EXPECT_TRUE(rep.holds());
  EXPECT_GE(rep.constants.at("C_mm"), 0.0);
}

TEST(ScalarTightness, DecompositionsMatchDirectRecursion) {
  for (double eps : {0.05, 0.1, 0.2}) {
    for (int H : {2, 5, 10}) {
      const double a = 1.0, b = 1.0, q = 1.0, r = 1.0;
      const auto rep = scalar_tightness(a, b, q, r, eps, H);
      EXPECT_TRUE(rep.holds()) << "eps " << eps << " H " << H;
      const auto s = oracle::scalar_riccati(a, b, q, r, a - eps, 0.0, H);
      for (int t = 0; t <= H; ++t) {
        EXPECT_NEAR(rep.series.at("p_star")[t], s.star[t], 1e-12);
        EXPECT_NEAR(rep.series.at("p_mm")[t], s.ce[t], 1e-12);
        EXPECT_NEAR(rep.series.at("p_ilc")[t], s.ilc[t], 1e-12);
      }
      for (int t = 0; t < H; ++t) {
        const double p = s.star[t + 1], c = s.ce[t + 1], l = s.ilc[t + 1];
        const double sat = a * a * b * b * p * p / r / (1.0 + b * b * p / r);
        EXPECT_NEAR(s.star[t] - s.ce[t],
                    p * (2 * a * eps - eps * eps) - sat + (a - eps) * (a - eps) * (p - c),
                    1e-12 * (1 + std::abs(s.star[t])));
        EXPECT_NEAR(s.star[t] - s.ilc[t], a * p * eps - sat + a * (a - eps) * (p - l),
                    1e-12 * (1 + std::abs(s.star[t])));
      }
      for (double ratio : rep.series.at("ratio_ilc")) EXPECT_LE(ratio, 1.0 + 1e-9);
      for (double ratio : rep.series.at("ratio_mm")) EXPECT_LE(ratio, 1.0 + 1e-9);
    }
  }
}

TEST(ScalarTightness, RejectsDegenerateInstances) {
  EXPECT_THROW(scalar_tightness(1, 1, 1, 1, 0.1, 0), InvalidInput);
  EXPECT_THROW(scalar_tightness(1, 1, 0, 1, 0.1, 2), InvalidInput);
}

TEST(MatrixLemmas, ThousandRandomTrials) {
  const auto rep = matrix_lemma_checks(1000, 5, 42);
  EXPECT_EQ(rep.entries.size(), 3000u);
  EXPECT_EQ(rep.violations(), 0);
}

TEST(MatrixLemmas, IndependentSpotCheck) {
  // ‖N(I+MN)⁻¹‖ ≤ ‖N‖ for PSD M, N, evaluated with Eigen's SVD directly.
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 1 + trial % 5;
    Mat X(k, k), Y(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        X(i, j) = g(rng);
        Y(i, j) = g(rng);
      }
    const Mat N = X * X.transpose();
    const Mat M = Y * Y.transpose();
    const Mat lhs = N * (Mat::Identity(k, k) + M * N).inverse();
    const double nl = Eigen::JacobiSVD<Mat>(lhs).singularValues()(0);
    const double nn = Eigen::JacobiSVD<Mat>(N).singularValues()(0);
    EXPECT_LE(nl, nn * (1.0 + 1e-10));
  }
  EXPECT_THROW(matrix_lemma_checks(0, 5, 1), InvalidInput);
}

TEST(BoundReport, SlackRule) {
  BoundReport rep;
  rep.entries = {{1.0, 1.0, true}, {1.0 + 5e-10, 1.0, true}, {2.0, 1.0, false}, {1.1, 1.0, true}};
  EXPECT_EQ(rep.applicable(), 3);
  EXPECT_EQ(rep.violations(), 1);
  EXPECT_FALSE(rep.holds());
}
