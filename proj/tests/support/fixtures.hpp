#pragma once

#include <vector>

#include "hurl/envs.hpp"
#include "hurl/mdp.hpp"

namespace hurl::fixture {

/// One state, |rewards| actions, every action a self-loop.
inline TabularMdp single_state(std::vector<double> rewards, double gamma) {
  const auto m = static_cast<Index>(rewards.size());
  Matrix reward(1, m);
  for (Index a = 0; a < m; ++a) reward(0, a) = rewards[static_cast<std::size_t>(a)];
  return TabularMdp(1, m, Matrix::Ones(m, 1), reward, gamma, Vector::Ones(1));
}

/// Deterministic successor table next[s][a]; rewards r[s][a]; d0 = delta(start).
inline TabularMdp deterministic(const std::vector<std::vector<Index>>& next,
                                const std::vector<std::vector<double>>& r, double gamma,
                                Index start = 0, RewardRange range = {}) {
  const auto n = static_cast<Index>(next.size());
  const auto m = static_cast<Index>(next.front().size());
  Matrix transition = Matrix::Zero(n * m, n);
  Matrix reward(n, m);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m; ++a) {
      transition(s * m + a, next[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]) = 1.0;
      reward(s, a) = r[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
    }
  }
  Vector d0 = Vector::Zero(n);
  d0(start) = 1.0;
  return TabularMdp(n, m, transition, reward, gamma, d0, range);
}

inline TabularMdp random_mdp(std::uint64_t seed, Index n = 8, Index m = 3, double gamma = 0.9) {
  RandomMdpSpec spec;
  spec.n_states = n;
  spec.n_actions = m;
  spec.discount = gamma;
  spec.seed = seed;
  return generate_random_mdp(spec);
}

}  // namespace hurl::fixture
