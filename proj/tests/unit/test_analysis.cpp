#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hurl/analysis.hpp"
#include "hurl/envs.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"
#include "oracles.hpp"

namespace hurl {
namespace {

double true_gap(const TabularMdp& mdp, const Policy& pi) {
  const std::vector<double> v_star = oracle::optimal_value(mdp);
  const std::vector<double> v_pi = oracle::policy_value(mdp, pi);
  double gap = 0.0;
  for (Index s = 0; s < mdp.n_states(); ++s) {
    gap += mdp.initial_dist()(s) * (v_star[static_cast<std::size_t>(s)] - v_pi[static_cast<std::size_t>(s)]);
  }
  return gap;
}

TEST(Decompose, OptimalHeuristicHasNoBias) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed);
    const Heuristic h = policy_value_heuristic(mdp, policy_iteration(mdp).policy);
    Rng rng(seed);
    const Policy pi = random_policy(8, 3, rng);
    for (double lambda : {0.0, 0.4, 1.0}) {
      const DecompositionReport r = decompose(mdp, h, lambda, pi);
      EXPECT_NEAR(r.bias, 0.0, 1e-8);
      EXPECT_NEAR(r.regret, true_gap(mdp, pi), 1e-7);
    }
  }
}

TEST(Decompose, ReshapedOptimalPolicyHasNoRegret) {
  const TabularMdp mdp = fixture::random_mdp(11);
  Rng rng(11);
  const Heuristic h = random_heuristic(8, 0.0, 10.0, rng);
  for (double lambda : {0.0, 0.3, 0.7}) {
    const Policy pi = policy_iteration(hurl_reshape(mdp, h, lambda).materialized()).policy;
    const DecompositionReport r = decompose(mdp, h, lambda, pi);
    EXPECT_NEAR(r.regret, 0.0, 1e-8);
    EXPECT_NEAR(r.bias, true_gap(mdp, pi), 1e-7);
  }
}

TEST(Decompose, LambdaOneIsPureRegret) {
  const TabularMdp mdp = fixture::random_mdp(12);
  Rng rng(12);
  const Heuristic h = random_heuristic(8, -4.0, 4.0, rng);
  const Policy pi = random_policy(8, 3, rng);
  const DecompositionReport r = decompose(mdp, h, 1.0, pi);
  EXPECT_NEAR(r.bias, 0.0, 1e-9);
  EXPECT_NEAR(r.regret, true_gap(mdp, pi), 1e-7);
  EXPECT_EQ(r.bias_upper_bound_C, 0.0);
}

TEST(Decompose, IdentityOnRandomMdpAgainstOracle) {
  const TabularMdp mdp = fixture::random_mdp(13, 8, 3, 0.9);
  Rng rng(13);
  const Heuristic h = random_heuristic(8, 0.0, 10.0, rng);
  const Policy pi = random_policy(8, 3, rng);
  const DecompositionReport r = decompose(mdp, h, 0.6, pi);
  EXPECT_NEAR(r.regret + r.bias, true_gap(mdp, pi), 1e-7);
  EXPECT_LE(r.identity_residual(), 1e-9);
  EXPECT_NEAR(r.v_star_d0 - r.v_pi_d0, true_gap(mdp, pi), 1e-7);
}

TEST(Decompose, LambdaZeroBanditRegret) {
  // With lambda = 0 the reshaped problem is a one-step bandit with reward
  // r + gamma E[h]; its optimal policy maximizes that and regret is the
  // occupancy-weighted gap.
  const TabularMdp mdp = fixture::random_mdp(14, 6, 4);
  Rng rng(14);
  const Heuristic h = random_heuristic(6, 0.0, 10.0, rng);
  const Policy pi = random_policy(6, 4, rng);
  const Matrix bandit = mdp.reward() + mdp.discount() * mdp.expected_next(h.values);
  const OccupancyMeasure d = occupancy(mdp, pi);
  double expected = 0.0;
  for (Index s = 0; s < 6; ++s) {
    for (Index a = 0; a < 4; ++a) {
      expected += d.state_action_dist(s, a) * (bandit.row(s).maxCoeff() - bandit(s, a));
    }
  }
  expected /= 1.0 - mdp.discount();
  const DecompositionReport r = decompose(mdp, h, 0.0, pi);
  EXPECT_NEAR(r.regret, expected, 1e-9);
  EXPECT_NEAR(r.gap_identity_regret, expected, 1e-9);
}

TEST(Decompose, ChainComponentsAgree) {
  const TabularMdp chain = build_chain();
  const ChainHeuristics hs = build_good_bad_heuristics(chain);
  const Policy pi = Policy::uniform(10, 2);
  for (const Heuristic* h : {&hs.good, &hs.bad}) {
    for (double lambda : {0.0, 0.5, 1.0}) {
      const DecompositionReport r = decompose(chain, *h, lambda, pi);
      EXPECT_LE(r.identity_residual(), 1e-9);
      EXPECT_NEAR(r.regret, r.gap_identity_regret, 1e-9);
      EXPECT_GE(r.regret, -1e-9);
      EXPECT_LE(r.bias, r.bias_upper_bound_C + 1e-9);
      EXPECT_LE(r.bias, r.bias_upper_bound_linf + 1e-9);
    }
  }
}

TEST(ActionGap, NonpositiveAndZeroOnReshapedGreedy) {
  const TabularMdp mdp = fixture::random_mdp(15);
  Rng rng(15);
  const Heuristic h = random_heuristic(8, -2.0, 6.0, rng);
  const QFn gap = reshaped_action_gap(mdp, h, 0.35);
  EXPECT_LE(gap.values.maxCoeff(), 1e-10);
  for (Index s = 0; s < 8; ++s) EXPECT_NEAR(gap.values.row(s).maxCoeff(), 0.0, 1e-10);
}

TEST(BiasBounds, LinfAgainstHandComputation) {
  const TabularMdp mdp = fixture::random_mdp(16, 6, 2, 0.8);
  const Vector v_star = policy_iteration(mdp).value.values;
  Vector h = v_star;
  for (Index s = 0; s < 6; ++s) h(s) += (s % 2 == 0 ? 0.3 : -0.3) + 5.0;
  const double lambda = 0.5;
  const double expected = std::pow(1.0 - lambda * 0.8, 2) / std::pow(1.0 - 0.8, 2) * 0.3;
  EXPECT_NEAR(offset_linf_error(h, v_star), 0.3, 1e-12);
  EXPECT_NEAR(bias_bound_linf(mdp, Heuristic{h}, lambda), expected, 1e-10);
}

TEST(BiasBounds, HoldOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed, 5, 3, 0.85);
    Rng rng(seed);
    const Heuristic h = random_heuristic(5, -3.0, 9.0, rng);
    const Policy pi = random_policy(5, 3, rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DecompositionReport r = decompose(mdp, h, lambda, pi);
    EXPECT_LE(r.bias, r.bias_upper_bound_C + 1e-8) << "seed " << seed;
    EXPECT_LE(r.bias, r.bias_upper_bound_linf + 1e-8) << "seed " << seed;
    EXPECT_GE(r.regret, -1e-8) << "seed " << seed;
  }
}

TEST(BiasBounds, CBoundMatchesTruncatedSeries) {
  const TabularMdp mdp = fixture::random_mdp(17, 6, 2, 0.8);
  Rng rng(17);
  const Heuristic h = random_heuristic(6, 0.0, 5.0, rng);
  const Policy pi = random_policy(6, 2, rng);
  const double lambda = 0.4;
  const Policy pi_star = policy_iteration(mdp).policy;
  const std::vector<double> v_star = oracle::optimal_value(mdp);
  const std::vector<double> v_tilde = oracle::optimal_value(hurl_reshape(mdp, h, lambda).materialized());
  std::vector<double> g_star(6), g_pi(6);
  for (std::size_t s = 0; s < 6; ++s) {
    g_star[s] = v_star[s] - h.values(static_cast<Index>(s));
    g_pi[s] = h.values(static_cast<Index>(s)) - v_tilde[s];
  }
  const double expected = (1.0 - lambda) * 0.8 *
                          (oracle::truncated_functional(mdp, pi_star, g_star, lambda * 0.8, 2000) +
                           oracle::truncated_functional(mdp, pi, g_pi, 0.8, 2000));
  EXPECT_NEAR(bias_bound_C(mdp, h, lambda, pi), expected, 1e-9);
}

TEST(OffsetInvariance, SelectedOffsets) {
  const TabularMdp mdp = fixture::random_mdp(18);
  Rng rng(18);
  const Heuristic h = random_heuristic(8, 0.0, 10.0, rng);
  const Policy pi = random_policy(8, 3, rng);
  for (double b : {0.0, 7.3, -1.0 / (1.0 - 0.9)}) {
    const auto [bias_diff, regret_diff] = offset_invariance_check(mdp, h, 0.45, pi, b);
    EXPECT_LE(bias_diff, 1e-8);
    EXPECT_LE(regret_diff, 1e-8);
  }
}

TEST(CrossChecks, ClassicPerformanceDifference) {
  const TabularMdp mdp = fixture::random_mdp(19);
  Rng rng(19);
  const Policy pi = random_policy(8, 3, rng);
  EXPECT_LE(performance_difference_residual(mdp, pi, policy_iteration(mdp).value), 1e-9);
  const ValueFn arbitrary{random_heuristic(8, -5.0, 5.0, rng).values};
  EXPECT_LE(performance_difference_residual(mdp, pi, arbitrary), 1e-9);
}

TEST(CrossChecks, GeneralPdlSpecialCases) {
  const TabularMdp mdp = fixture::random_mdp(20);
  Rng rng(20);
  const Heuristic h = random_heuristic(8, 0.0, 10.0, rng);
  const Policy pi = random_policy(8, 3, rng);
  EXPECT_LE(general_pdl_check(mdp, h, 0.5, pi, evaluate_policy(mdp, pi)), 1e-9);
  EXPECT_LE(general_pdl_check(mdp, h, 0.0, pi, ValueFn{h.values}), 1e-9);
  EXPECT_LE(general_pdl_check(mdp, h, 1.0, pi, ValueFn{Vector::Zero(8)}), 1e-9);
}

TEST(CrossChecks, LemmaResidualsVanish) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed, 7, 3, 0.9);
    Rng rng(seed);
    const Heuristic h = random_heuristic(7, -3.0, 12.0, rng);
    const Policy pi = random_policy(7, 3, rng);
    const ValueFn v{random_heuristic(7, -3.0, 12.0, rng).values};
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    EXPECT_LE(bellman_backup_difference_residual(mdp, h, lambda, v), 1e-10);
    EXPECT_LE(value_difference_residual(mdp, h, lambda, pi), 1e-8);
    EXPECT_LE(value_change_violation(mdp, h, lambda, pi), 1e-8);
    EXPECT_LE(online_value_difference_residual(mdp, h, lambda, pi, v), 1e-8);
  }
}

}  // namespace
}  // namespace hurl
