#pragma once

// Finite discounted MDPs and the value objects computed on them.
//
// All types here are immutable after construction. Indices are 0-based.
// Transition kernels are stored as an (S*A) x S matrix whose row s*A + a is
// the next-state distribution P(. | s, a).

#include <Eigen/Core>

#include <span>
#include <utility>
#include <vector>

namespace hurl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Declared reward interval. Bounds that depend on the reward range (value
/// bounds, pessimistic floors) read it from here instead of assuming [0,1].
struct RewardRange {
  double lo = 0.0;
  double hi = 1.0;

  bool operator==(const RewardRange&) const = default;
};

/// Tolerances used when validating probability rows.
inline constexpr double kRowExactTol = 1e-12;
inline constexpr double kRowRenormalizeTol = 1e-9;

class TabularMdp {
 public:
  /// Validates every invariant. Rows off by at most 1e-9 are renormalized,
  /// anything further off (or any negative entry) is rejected.
  ///
  /// transition: (n_states * n_actions) x n_states, row s*A + a.
  /// reward: n_states x n_actions, every entry inside `range`.
  TabularMdp(Index n_states, Index n_actions, Matrix transition, Matrix reward, double discount,
             Vector initial_dist, RewardRange range = {});

  Index n_states() const noexcept { return n_states_; }
  Index n_actions() const noexcept { return n_actions_; }
  double discount() const noexcept { return discount_; }
  const RewardRange& reward_range() const noexcept { return range_; }

  const Matrix& transition() const noexcept { return transition_; }
  const Matrix& reward() const noexcept { return reward_; }
  const Vector& initial_dist() const noexcept { return initial_; }

  Index row(Index s, Index a) const noexcept { return s * n_actions_ + a; }
  double prob(Index s, Index a, Index next) const { return transition_(row(s, a), next); }
  auto next_dist(Index s, Index a) const { return transition_.row(row(s, a)); }

  /// E_{s'|s,a}[v(s')] as an S x A matrix.
  Matrix expected_next(const Vector& v) const;

  /// A state whose every action self-loops with zero reward.
  bool is_absorbing(Index s) const;

  /// Returns a copy with a different discount (same kernel, rewards, d0).
  TabularMdp with_discount(double discount) const;
  /// Returns a copy with replaced rewards and range; used by reshaping.
  TabularMdp with_reward(Matrix reward, double discount, RewardRange range) const;

  bool operator==(const TabularMdp& other) const;

 private:
  struct Trusted {};
  TabularMdp(Trusted, Index n_states, Index n_actions, Matrix transition, Matrix reward,
             double discount, Vector initial_dist, RewardRange range);

  Index n_states_;
  Index n_actions_;
  Matrix transition_;
  Matrix reward_;
  double discount_;
  Vector initial_;
  RewardRange range_;
};

/// Stochastic policy pi(a|s) stored as an S x A row-stochastic matrix.
class Policy {
 public:
  explicit Policy(Matrix probs);

  static Policy deterministic(std::span<const Index> actions, Index n_actions);
  static Policy uniform(Index n_states, Index n_actions);

  Index n_states() const noexcept { return probs_.rows(); }
  Index n_actions() const noexcept { return probs_.cols(); }
  const Matrix& probs() const noexcept { return probs_; }
  double operator()(Index s, Index a) const { return probs_(s, a); }

  bool is_deterministic() const;
  /// Most probable action (lowest index on ties).
  Index action(Index s) const;
  std::vector<Index> actions() const;

  bool operator==(const Policy& other) const { return probs_ == other.probs_; }

 private:
  Matrix probs_;
};

struct ValueFn {
  Vector values;

  Index size() const noexcept { return values.size(); }
  double operator()(Index s) const { return values(s); }
  /// sum_s dist(s) v(s); V(d0) when dist is the initial distribution.
  double at(const Vector& dist) const { return dist.dot(values); }
};

struct QFn {
  Matrix values;  // S x A

  double operator()(Index s, Index a) const { return values(s, a); }
};

/// Normalized discounted visitation d^pi = (1-gamma) sum_t gamma^t d^pi_t.
struct OccupancyMeasure {
  Vector state_dist;
  Matrix state_action_dist;  // state_dist(s) * pi(a|s)
};

}  // namespace hurl
