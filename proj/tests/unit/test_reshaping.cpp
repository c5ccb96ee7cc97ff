#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "hurl/envs.hpp"
#include "hurl/errors.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"
#include "oracles.hpp"

namespace hurl {
namespace {

TEST(HurlReshape, LambdaOneIsIdentity) {
  const TabularMdp mdp = fixture::random_mdp(1);
  Rng rng(1);
  const Heuristic h = random_heuristic(8, -3.0, 7.0, rng);
  const ReshapedMdp m = hurl_reshape(mdp, h, 1.0);
  EXPECT_EQ(m.reward(), mdp.reward());
  EXPECT_EQ(m.guidance_discount(), mdp.discount());
  EXPECT_EQ(m.materialized().transition(), mdp.transition());
}

TEST(HurlReshape, ZeroHeuristicOnlyShortensHorizon) {
  const TabularMdp mdp = fixture::random_mdp(2);
  const ReshapedMdp m = hurl_reshape(mdp, zero_heuristic(8), 0.5);
  EXPECT_EQ(m.reward(), mdp.reward());
  EXPECT_DOUBLE_EQ(m.guidance_discount(), 0.45);
}

TEST(HurlReshape, GuidanceDiscountIsExactProduct) {
  const TabularMdp mdp = fixture::random_mdp(3, 5, 2, 0.93);
  for (double lambda : {0.0, 0.1, 0.37, 0.9}) {
    EXPECT_EQ(hurl_reshape(mdp, zero_heuristic(5), lambda).guidance_discount(), lambda * 0.93);
  }
}

TEST(HurlReshape, ChainWithRandomPolicyHeuristic) {
  const TabularMdp chain = build_chain();
  const Policy pi = Policy::uniform(10, 2);
  const std::vector<double> h_oracle = oracle::policy_value(chain, pi);
  const Heuristic h = policy_value_heuristic(chain, pi);
  const ReshapedMdp m = hurl_reshape(chain, h, 0.5);
  // Display state 3 moving right lands in display state 4.
  EXPECT_NEAR(m.reward()(2, chain::kRight), 0.5 * 0.9 * h_oracle[3], 1e-12);
}

TEST(HurlReshape, RewardsMayLeaveUnitInterval) {
  const TabularMdp mdp = fixture::single_state({1.0}, 0.9);
  const ReshapedMdp m = hurl_reshape(mdp, Heuristic{Vector::Constant(1, 10.0)}, 0.0);
  EXPECT_NEAR(m.reward()(0, 0), 1.0 + 0.9 * 10.0, 1e-12);
}

TEST(HurlReshape, RejectsBadArguments) {
  const TabularMdp mdp = fixture::random_mdp(4);
  EXPECT_THROW(hurl_reshape(mdp, zero_heuristic(8), -0.01), DomainError);
  EXPECT_THROW(hurl_reshape(mdp, zero_heuristic(8), 1.01), DomainError);
  EXPECT_THROW(hurl_reshape(mdp, zero_heuristic(7), 0.5), DimensionError);
  EXPECT_THROW(hurl_reshape(mdp, Heuristic{Vector::Constant(8, NAN)}, 0.5), InvalidModelError);
}

TEST(HurlReshape, OffsetShiftsRewardUniformly) {
  const TabularMdp mdp = fixture::random_mdp(5);
  Rng rng(5);
  const Heuristic h = random_heuristic(8, 0.0, 4.0, rng);
  for (double lambda : {0.0, 0.3, 0.8}) {
    const ReshapedMdp a = hurl_reshape(mdp, h, lambda);
    const ReshapedMdp b = hurl_reshape(mdp, h.shifted(2.5), lambda);
    const Matrix diff = b.reward() - a.reward();
    EXPECT_NEAR(diff.maxCoeff(), (1.0 - lambda) * 0.9 * 2.5, 1e-12);
    EXPECT_NEAR(diff.minCoeff(), (1.0 - lambda) * 0.9 * 2.5, 1e-12);
    EXPECT_EQ(a.guidance_discount(), b.guidance_discount());
    EXPECT_EQ(policy_iteration(a.materialized()).policy, policy_iteration(b.materialized()).policy);
  }
}

TEST(HurlReshape, BoundedHeuristicKeepsValuesInRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed, 6, 3, 0.8);
    Rng rng(seed);
    const Heuristic h = random_heuristic(6, 0.0, 5.0, rng);
    for (double lambda : {0.0, 0.5, 1.0}) {
      const ReshapedMdp m = hurl_reshape(mdp, h, lambda);
      for (int k = 0; k < 10; ++k) {
        const ValueFn v = evaluate_policy(m.materialized(), random_policy(6, 3, rng));
        EXPECT_GE(v.values.minCoeff(), -1e-9);
        EXPECT_LE(v.values.maxCoeff(), 5.0 + 1e-9);
      }
    }
  }
}

TEST(ReshapeTransitionReward, Examples) {
  const Heuristic h{Vector::LinSpaced(3, 0.0, 2.0)};
  EXPECT_EQ(reshape_transition_reward(0.3, 2, h, 0.9, 0.9), 0.3);
  EXPECT_EQ(reshape_transition_reward(0.3, 0, h, 0.9, 0.45), 0.3);
  EXPECT_NEAR(reshape_transition_reward(0.1, 2, h, 0.9, 0.45), 1.0, 1e-15);
}

TEST(Pbrs, ZeroHeuristicIsIdentity) {
  const TabularMdp mdp = fixture::random_mdp(6);
  const TabularMdp bar = pbrs_reshape(mdp, zero_heuristic(8));
  EXPECT_EQ(bar.reward(), mdp.reward());
  EXPECT_EQ(bar.discount(), mdp.discount());
}

TEST(Pbrs, ConstantHeuristicShiftsUniformly) {
  const TabularMdp mdp = fixture::random_mdp(7);
  const TabularMdp bar = pbrs_reshape(mdp, Heuristic{Vector::Constant(8, 3.0)});
  EXPECT_NEAR((bar.reward() - mdp.reward()).maxCoeff(), (0.9 - 1.0) * 3.0, 1e-12);
  EXPECT_NEAR((bar.reward() - mdp.reward()).minCoeff(), (0.9 - 1.0) * 3.0, 1e-12);
  EXPECT_EQ(policy_iteration(bar).policy, policy_iteration(mdp).policy);
}

TEST(Pbrs, ChainOptimalPolicyPreserved) {
  const TabularMdp chain = build_chain();
  const Heuristic h = policy_value_heuristic(chain, Policy::uniform(10, 2));
  const Solution base = value_iteration(chain);
  const Solution shaped = value_iteration(pbrs_reshape(chain, h));
  for (Index s = 1; s < 9; ++s) EXPECT_EQ(shaped.policy.action(s), base.policy.action(s)) << "state " << s;
}

TEST(Pbrs, RandomMdpsKeepOptimalActions) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed, 7, 3);
    Rng rng(seed);
    const Heuristic h = random_heuristic(7, -10.0, 10.0, rng);
    const Solution base = policy_iteration(mdp);
    const Solution shaped = policy_iteration(pbrs_reshape(mdp, h));
    for (Index s = 0; s < 7; ++s) {
      const Index a = shaped.policy.action(s);
      const Index b = base.policy.action(s);
      if (a != b) {
        EXPECT_NEAR(shaped.q(s, a), shaped.q(s, b), 1e-9);
      }
    }
  }
}

TEST(PbrsLambda, EquivalentToHurlUpToPotential) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TabularMdp mdp = fixture::random_mdp(seed, 9, 4);
    Rng rng(seed);
    const Heuristic h = random_heuristic(9, -5.0, 15.0, rng);
    const double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const ReshapedMdp tilde = hurl_reshape(mdp, h, lambda);
    const TabularMdp bar = pbrs_lambda_reshape(mdp, h, lambda);
    EXPECT_EQ(bar.discount(), tilde.guidance_discount());
    const Matrix expected = tilde.reward() + tilde.guidance_discount() * mdp.expected_next(h.values) -
                            h.values.replicate(1, 4);
    EXPECT_LE((bar.reward() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PbrsLambda, EndpointCases) {
  const TabularMdp mdp = fixture::random_mdp(8);
  Rng rng(8);
  const Heuristic h = random_heuristic(8, 0.0, 3.0, rng);
  EXPECT_TRUE(pbrs_lambda_reshape(mdp, h, 1.0) == pbrs_reshape(mdp, h));
  const TabularMdp zero = pbrs_lambda_reshape(mdp, zero_heuristic(8), 0.4);
  EXPECT_EQ(zero.reward(), mdp.reward());
  EXPECT_DOUBLE_EQ(zero.discount(), 0.4 * 0.9);
  EXPECT_THROW(pbrs_lambda_reshape(mdp, h, 2.0), DomainError);
}

TEST(Schedule, FirstIterationIsLambdaZero) {
  for (double l0 : {0.0, 0.3, 0.95}) {
    EXPECT_EQ(schedule_lambda(LambdaSchedule::tanh(l0, 1.0, 10), 1), l0);
    EXPECT_EQ(schedule_lambda(LambdaSchedule::tanh(l0, 0.3, 50), 1), l0);
  }
}

TEST(Schedule, ReachesOneAtHorizonWhenAlphaIsOne) {
  for (long n : {2L, 5L, 11L, 200L}) {
    for (double l0 : {0.0, 0.5, 0.98}) {
      EXPECT_NEAR(schedule_lambda(LambdaSchedule::tanh(l0, 1.0, n), n), 1.0, 1e-12);
    }
  }
}

TEST(Schedule, MatchesDirectEvaluation) {
  const double omega = std::atanh(0.99) / (11.0 - 1.0);
  const double expected = 0.5 + 0.5 * std::tanh(omega * 5.0) / 0.99;
  EXPECT_NEAR(schedule_lambda(LambdaSchedule::tanh(0.5, 1.0, 11), 6), expected, 1e-15);
}

TEST(Schedule, MonotoneAndBounded) {
  for (double alpha : {0.02, 0.1, 0.5, 1.0, 3.0, 1e5}) {
    const LambdaSchedule s = LambdaSchedule::tanh(0.2, alpha, 100);
    double prev = -1.0;
    for (long n = 1; n <= 100; ++n) {
      const double l = schedule_lambda(s, n);
      EXPECT_GE(l, prev);
      EXPECT_GE(l, 0.0);
      EXPECT_LE(l, 1.0);
      prev = l;
    }
  }
}

TEST(Schedule, ExtremeAlphaValues) {
  EXPECT_NEAR(schedule_lambda(LambdaSchedule::tanh(0.3, 1e5, 100), 100), 0.3, 1e-4);
  // alpha * N = 10: the ramp saturates at n = 10 and stays clamped.
  const LambdaSchedule fast = LambdaSchedule::tanh(0.3, 1e-3, 10000);
  EXPECT_NEAR(schedule_lambda(fast, 10), 1.0, 1e-12);
  EXPECT_EQ(schedule_lambda(fast, 5000), 1.0);
}

TEST(Schedule, ConstantKind) {
  const LambdaSchedule s = LambdaSchedule::constant(0.7, 5);
  for (long n = 1; n <= 5; ++n) EXPECT_EQ(schedule_lambda(s, n), 0.7);
}

TEST(Schedule, RejectsInvalidParameters) {
  EXPECT_THROW(LambdaSchedule::tanh(0.5, 1.0, 1), DomainError);
  EXPECT_THROW(LambdaSchedule::tanh(0.5, 0.1, 10), DomainError);
  EXPECT_THROW(LambdaSchedule::tanh(0.5, 0.0, 10), DomainError);
  EXPECT_THROW(LambdaSchedule::tanh(1.5, 1.0, 10), DomainError);
  EXPECT_THROW(LambdaSchedule::constant(0.5, 0), DomainError);
  const LambdaSchedule s = LambdaSchedule::tanh(0.5, 1.0, 10);
  EXPECT_THROW(schedule_lambda(s, 0), DomainError);
  EXPECT_THROW(schedule_lambda(s, 11), DomainError);
}

}  // namespace
}  // namespace hurl
