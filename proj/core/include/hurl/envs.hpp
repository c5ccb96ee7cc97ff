#pragma once

// Benchmark MDPs: the 10-state chain, a slippery gridworld, and a seeded
// random-MDP generator for verification corpora.

#include <cstdint>
#include <random>

#include "hurl/heuristics.hpp"
#include "hurl/mdp.hpp"

namespace hurl {

/// 10-state chain (states 1..10 in display, 0..9 internally). Actions:
/// 0 = left, 1 = right. States 1 and 10 are absorbing; everything else moves
/// one cell. Nonzero rewards: r(2, left) = 0.1, r(4, right) = -0.2,
/// r(5, right) = 0.1. gamma = 0.9, d0 = delta(state 3). The -0.2 entry needs
/// the declared reward range [-1, 1].
namespace chain {
inline constexpr Index kStates = 10;
inline constexpr Index kLeft = 0;
inline constexpr Index kRight = 1;
inline constexpr Index kStart = 2;  // display state 3
inline constexpr double kDiscount = 0.9;

/// 0-based index -> 1-based display label.
constexpr Index label(Index s) { return s + 1; }
}  // namespace chain

TabularMdp build_chain();

struct ChainHeuristics {
  Heuristic good;   // V of the uniform-random policy
  Heuristic bad;    // V, in the original chain, of the myopic policy below
  Policy myopic;    // optimal policy of the chain reshaped with h = 0, lambda = 0.5
};

ChainHeuristics build_good_bad_heuristics(const TabularMdp& chain);

struct GridworldSpec {
  Index width = 4;
  Index height = 4;
  double goal_reward = 1.0;
  double step_reward = 0.0;
  double discount = 0.95;
  double slip = 0.0;  // mass moved to the two lateral directions, split evenly
};

/// Actions 0..3 = up, right, down, left. Start (0,0), goal (width-1, height-1)
/// absorbing. r(s,a) = step_reward + goal_reward * P(enter goal | s,a).
/// Moves into a wall stay put. State index = y * width + x.
TabularMdp build_gridworld(const GridworldSpec& spec);

struct RandomMdpSpec {
  Index n_states = 5;
  Index n_actions = 2;
  double dirichlet_alpha = 1.0;
  double discount = 0.9;
  std::uint64_t seed = 0;
};

/// Dirichlet(alpha * 1) transition rows, U[0,1] rewards, uniform d0.
TabularMdp generate_random_mdp(const RandomMdpSpec& spec);

using Rng = std::mt19937_64;

/// Each row drawn from Dirichlet(1).
Policy random_policy(Index n_states, Index n_actions, Rng& rng);
/// Entries uniform in [lo, hi].
Heuristic random_heuristic(Index n_states, double lo, double hi, Rng& rng);
/// A Dirichlet(alpha * 1) draw of length n.
Vector dirichlet(Index n, double alpha, Rng& rng);

}  // namespace hurl
