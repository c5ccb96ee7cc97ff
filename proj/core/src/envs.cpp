#include "hurl/envs.hpp"

#include <algorithm>
#include <array>

#include "hurl/errors.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"

namespace hurl {

TabularMdp build_chain() {
  using namespace chain;
  const Index n = kStates;
  const Index m = 2;
  Matrix transition = Matrix::Zero(n * m, n);
  for (Index s = 0; s < n; ++s) {
    const bool absorbing = s == 0 || s == n - 1;
    transition(s * m + kLeft, absorbing ? s : s - 1) = 1.0;
    transition(s * m + kRight, absorbing ? s : s + 1) = 1.0;
  }
  Matrix reward = Matrix::Zero(n, m);
  reward(1, kLeft) = 0.1;
  reward(3, kRight) = -0.2;
  reward(4, kRight) = 0.1;
  Vector d0 = Vector::Zero(n);
  d0(kStart) = 1.0;
  return TabularMdp(n, m, std::move(transition), std::move(reward), kDiscount, std::move(d0),
                    RewardRange{-1.0, 1.0});
}

ChainHeuristics build_good_bad_heuristics(const TabularMdp& chain) {
  Heuristic good = policy_value_heuristic(chain, Policy::uniform(chain.n_states(), chain.n_actions()));
  const ReshapedMdp myopic_problem = hurl_reshape(chain, zero_heuristic(chain.n_states()), 0.5);
  Policy myopic = policy_iteration(myopic_problem.materialized()).policy;
  Heuristic bad = policy_value_heuristic(chain, myopic);
  return ChainHeuristics{std::move(good), std::move(bad), std::move(myopic)};
}

TabularMdp build_gridworld(const GridworldSpec& spec) {
  if (spec.width < 2 || spec.height < 2) {
    throw DimensionError("build_gridworld: width and height must be >= 2");
  }
  if (!(spec.slip >= 0.0 && spec.slip <= 0.5)) {
    throw DomainError("build_gridworld: slip must lie in [0, 0.5]");
  }
  const Index w = spec.width;
  const Index n = w * spec.height;
  const Index m = 4;
  const Index goal = n - 1;
  constexpr std::array<std::array<int, 2>, 4> kMoves{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};

  const auto step = [&](Index s, Index dir) {
    const Index x = s % w + kMoves[static_cast<std::size_t>(dir)][0];
    const Index y = s / w + kMoves[static_cast<std::size_t>(dir)][1];
    if (x < 0 || x >= w || y < 0 || y >= spec.height) return s;
    return y * w + x;
  };

  Matrix transition = Matrix::Zero(n * m, n);
  Matrix reward = Matrix::Zero(n, m);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m; ++a) {
      const Index row = s * m + a;
      if (s == goal) {
        transition(row, s) = 1.0;
        continue;
      }
      transition(row, step(s, a)) += 1.0 - spec.slip;
      if (spec.slip > 0.0) {
        transition(row, step(s, (a + 1) % m)) += 0.5 * spec.slip;
        transition(row, step(s, (a + 3) % m)) += 0.5 * spec.slip;
      }
      reward(s, a) = spec.step_reward + spec.goal_reward * transition(row, goal);
    }
  }
  Vector d0 = Vector::Zero(n);
  d0(0) = 1.0;
  const RewardRange range{std::min({0.0, spec.step_reward, spec.step_reward + spec.goal_reward}),
                          std::max({0.0, spec.step_reward, spec.step_reward + spec.goal_reward})};
  return TabularMdp(n, m, std::move(transition), std::move(reward), spec.discount, std::move(d0),
                    range);
}

Vector dirichlet(Index n, double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw DomainError("dirichlet: alpha must be positive");
  std::gamma_distribution<double> draw(alpha, 1.0);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = draw(rng);
  double total = x.sum();
  if (total <= 0.0) {
    // All draws underflowed (tiny alpha): fall back to a vertex.
    x.setZero();
    x(std::uniform_int_distribution<Index>(0, n - 1)(rng)) = 1.0;
    total = 1.0;
  }
  return x / total;
}

TabularMdp generate_random_mdp(const RandomMdpSpec& spec) {
  if (spec.n_states <= 0 || spec.n_actions <= 0) {
    throw DimensionError("generate_random_mdp: shape must be positive");
  }
  Rng rng(spec.seed);
  const Index n = spec.n_states;
  const Index m = spec.n_actions;
  Matrix transition(n * m, n);
  for (Index row = 0; row < n * m; ++row) {
    transition.row(row) = dirichlet(n, spec.dirichlet_alpha, rng).transpose();
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix reward(n, m);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < m; ++a) reward(s, a) = unit(rng);
  }
  return TabularMdp(n, m, std::move(transition), std::move(reward), spec.discount,
                    Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

Policy random_policy(Index n_states, Index n_actions, Rng& rng) {
  Matrix probs(n_states, n_actions);
  for (Index s = 0; s < n_states; ++s) probs.row(s) = dirichlet(n_actions, 1.0, rng).transpose();
  return Policy(std::move(probs));
}

Heuristic random_heuristic(Index n_states, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> draw(lo, hi);
  Vector values(n_states);
  for (Index s = 0; s < n_states; ++s) values(s) = draw(rng);
  return Heuristic{std::move(values), Provenance::engineered};
}

}  // namespace hurl
