#include <gtest/gtest.h>

#include "hurl/envs.hpp"
#include "hurl/errors.hpp"
#include "hurl/solvers.hpp"
#include "oracles.hpp"

namespace hurl {
namespace {

TEST(Chain, Structure) {
  const TabularMdp c = build_chain();
  EXPECT_EQ(c.n_states(), 10);
  EXPECT_EQ(c.n_actions(), 2);
  EXPECT_EQ(c.discount(), 0.9);
  EXPECT_EQ(c.reward_range(), (RewardRange{-1.0, 1.0}));
  EXPECT_EQ(c.initial_dist()(chain::kStart), 1.0);
  EXPECT_TRUE(c.is_absorbing(0));
  EXPECT_TRUE(c.is_absorbing(9));
  for (Index s = 1; s < 9; ++s) {
    EXPECT_FALSE(c.is_absorbing(s));
    EXPECT_EQ(c.prob(s, chain::kLeft, s - 1), 1.0);
    EXPECT_EQ(c.prob(s, chain::kRight, s + 1), 1.0);
  }
  EXPECT_EQ(c.reward()(1, chain::kLeft), 0.1);
  EXPECT_EQ(c.reward()(3, chain::kRight), -0.2);
  EXPECT_EQ(c.reward()(4, chain::kRight), 0.1);
  EXPECT_EQ(c.reward().cwiseAbs().sum(), 0.4);
}

TEST(Chain, OptimalValueAgainstEnumeration) {
  const TabularMdp c = build_chain();
  const oracle::Enumeration e = oracle::enumerate_policies(c);
  EXPECT_NEAR(value_iteration(c).value.at(c.initial_dist()), e.best_d0, 1e-9);
}

TEST(Chain, HeuristicsHaveExpectedProvenance) {
  const ChainHeuristics hs = build_good_bad_heuristics(build_chain());
  EXPECT_EQ(hs.good.provenance, Provenance::policy_value);
  EXPECT_EQ(hs.bad.provenance, Provenance::policy_value);
  EXPECT_TRUE(hs.myopic.is_deterministic());
}

TEST(Gridworld, TwoByTwoOptimalValue) {
  GridworldSpec spec;
  spec.width = 2;
  spec.height = 2;
  spec.discount = 0.5;
  const TabularMdp g = build_gridworld(spec);
  EXPECT_TRUE(g.is_absorbing(3));
  const std::vector<double> v = oracle::optimal_value(g);
  EXPECT_NEAR(v[0], 0.5, 1e-12);
  EXPECT_NEAR(value_iteration(g).value(0), 0.5, 1e-9);
}

TEST(Gridworld, SlipSplitsMassLaterally) {
  GridworldSpec spec;
  spec.width = 3;
  spec.height = 3;
  spec.slip = 0.2;
  const TabularMdp g = build_gridworld(spec);
  // Centre cell (1,1) = 4, action right -> (2,1) = 5; laterals up (1,0) = 1 and down (1,2) = 7.
  EXPECT_NEAR(g.prob(4, 1, 5), 0.8, 1e-15);
  EXPECT_NEAR(g.prob(4, 1, 1), 0.1, 1e-15);
  EXPECT_NEAR(g.prob(4, 1, 7), 0.1, 1e-15);
  // Corner (0,0) moving up bumps the wall.
  EXPECT_NEAR(g.prob(0, 0, 0), 0.9, 1e-15);
  spec.slip = 0.6;
  EXPECT_THROW(build_gridworld(spec), DomainError);
}

TEST(RandomMdp, DeterministicPerSeed) {
  RandomMdpSpec spec;
  spec.n_states = 6;
  spec.n_actions = 3;
  spec.seed = 42;
  EXPECT_TRUE(generate_random_mdp(spec) == generate_random_mdp(spec));
  RandomMdpSpec other = spec;
  other.seed = 43;
  EXPECT_FALSE(generate_random_mdp(spec) == generate_random_mdp(other));
}

TEST(RandomMdp, LargeConcentrationGivesNearUniformRows) {
  RandomMdpSpec spec;
  spec.n_states = 5;
  spec.n_actions = 2;
  spec.dirichlet_alpha = 1000.0;
  const TabularMdp m = generate_random_mdp(spec);
  EXPECT_LE((m.transition().array() - 0.2).abs().maxCoeff(), 0.05);
  EXPECT_GE(m.reward().minCoeff(), 0.0);
  EXPECT_LE(m.reward().maxCoeff(), 1.0);
  EXPECT_NEAR(m.initial_dist().sum(), 1.0, 1e-15);
}

TEST(RandomDraws, ShapesAndRanges) {
  Rng rng(1);
  const Policy pi = random_policy(4, 3, rng);
  EXPECT_EQ(pi.n_states(), 4);
  EXPECT_EQ(pi.n_actions(), 3);
  const Heuristic h = random_heuristic(50, -2.0, 3.0, rng);
  EXPECT_GE(h.values.minCoeff(), -2.0);
  EXPECT_LE(h.values.maxCoeff(), 3.0);
  const Vector d = dirichlet(7, 0.5, rng);
  EXPECT_NEAR(d.sum(), 1.0, 1e-12);
  EXPECT_GE(d.minCoeff(), 0.0);
}

}  // namespace
}  // namespace hurl
