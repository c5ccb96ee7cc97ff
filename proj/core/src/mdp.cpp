#include "hurl/mdp.hpp"

#include <cmath>
#include <string>

#include "hurl/errors.hpp"

namespace hurl {
namespace {

std::string where(Index s, Index a) {
  return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

// Checks a probability row in place; renormalizes when the mass is off by a
// hair, throws otherwise.
template <typename Row>
void check_distribution(Row&& row, const std::string& what) {
  for (Index i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row(i)) || row(i) < 0.0) {
      throw InvalidModelError(what + ": entry " + std::to_string(i) + " is negative or non-finite");
    }
  }
  const double mass = row.sum();
  const double off = std::abs(mass - 1.0);
  if (off <= kRowExactTol) return;
  if (off <= kRowRenormalizeTol) {
    row /= mass;
    return;
  }
  throw InvalidModelError(what + ": probabilities sum to " + std::to_string(mass));
}

}  // namespace

TabularMdp::TabularMdp(Index n_states, Index n_actions, Matrix transition, Matrix reward,
                       double discount, Vector initial_dist, RewardRange range)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount),
      initial_(std::move(initial_dist)),
      range_(range) {
  if (n_states_ <= 0 || n_actions_ <= 0) {
    throw DimensionError("TabularMdp: n_states and n_actions must be positive");
  }
  if (transition_.rows() != n_states_ * n_actions_ || transition_.cols() != n_states_) {
    throw DimensionError("TabularMdp: transition must be (S*A) x S");
  }
  if (reward_.rows() != n_states_ || reward_.cols() != n_actions_) {
    throw DimensionError("TabularMdp: reward must be S x A");
  }
  if (initial_.size() != n_states_) {
    throw DimensionError("TabularMdp: initial distribution must have S entries");
  }
  if (!(discount_ >= 0.0 && discount_ < 1.0)) {
    throw InvalidModelError("TabularMdp: discount must lie in [0, 1), got " +
                            std::to_string(discount_));
  }
  if (!(range_.lo <= range_.hi)) throw InvalidModelError("TabularMdp: empty reward range");

  for (Index s = 0; s < n_states_; ++s) {
    for (Index a = 0; a < n_actions_; ++a) {
      check_distribution(transition_.row(row(s, a)), "transition " + where(s, a));
      const double r = reward_(s, a);
      if (!std::isfinite(r) || r < range_.lo || r > range_.hi) {
        throw InvalidModelError("reward " + where(s, a) + " = " + std::to_string(r) +
                                " outside declared range [" + std::to_string(range_.lo) + ", " +
                                std::to_string(range_.hi) + "]");
      }
    }
  }
  check_distribution(initial_, "initial distribution");
}

TabularMdp::TabularMdp(Trusted, Index n_states, Index n_actions, Matrix transition, Matrix reward,
                       double discount, Vector initial_dist, RewardRange range)
    : n_states_(n_states),
      n_actions_(n_actions),
      transition_(std::move(transition)),
      reward_(std::move(reward)),
      discount_(discount),
      initial_(std::move(initial_dist)),
      range_(range) {}

Matrix TabularMdp::expected_next(const Vector& v) const {
  if (v.size() != n_states_) throw DimensionError("expected_next: vector has wrong length");
  const Vector flat = transition_ * v;
  Matrix out(n_states_, n_actions_);
  for (Index s = 0; s < n_states_; ++s) {
    for (Index a = 0; a < n_actions_; ++a) out(s, a) = flat(row(s, a));
  }
  return out;
}

bool TabularMdp::is_absorbing(Index s) const {
  for (Index a = 0; a < n_actions_; ++a) {
    if (transition_(row(s, a), s) != 1.0 || reward_(s, a) != 0.0) return false;
  }
  return true;
}

TabularMdp TabularMdp::with_discount(double discount) const {
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw InvalidModelError("with_discount: discount must lie in [0, 1)");
  }
  return TabularMdp(Trusted{}, n_states_, n_actions_, transition_, reward_, discount, initial_,
                    range_);
}

TabularMdp TabularMdp::with_reward(Matrix reward, double discount, RewardRange range) const {
  if (reward.rows() != n_states_ || reward.cols() != n_actions_) {
    throw DimensionError("with_reward: reward must be S x A");
  }
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw InvalidModelError("with_reward: discount must lie in [0, 1)");
  }
  if (!reward.allFinite()) throw InvalidModelError("with_reward: non-finite reward");
  return TabularMdp(Trusted{}, n_states_, n_actions_, transition_, std::move(reward), discount,
                    initial_, range);
}

bool TabularMdp::operator==(const TabularMdp& other) const {
  return n_states_ == other.n_states_ && n_actions_ == other.n_actions_ &&
         discount_ == other.discount_ && range_ == other.range_ &&
         transition_ == other.transition_ && reward_ == other.reward_ &&
         initial_ == other.initial_;
}

Policy::Policy(Matrix probs) : probs_(std::move(probs)) {
  if (probs_.rows() <= 0 || probs_.cols() <= 0) throw DimensionError("Policy: empty matrix");
  for (Index s = 0; s < probs_.rows(); ++s) {
    check_distribution(probs_.row(s), "policy row " + std::to_string(s));
  }
}

Policy Policy::deterministic(std::span<const Index> actions, Index n_actions) {
  Matrix probs = Matrix::Zero(static_cast<Index>(actions.size()), n_actions);
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] < 0 || actions[s] >= n_actions) {
      throw DimensionError("Policy::deterministic: action index out of range");
    }
    probs(static_cast<Index>(s), actions[s]) = 1.0;
  }
  return Policy(std::move(probs));
}

Policy Policy::uniform(Index n_states, Index n_actions) {
  return Policy(Matrix::Constant(n_states, n_actions, 1.0 / static_cast<double>(n_actions)));
}

bool Policy::is_deterministic() const {
  for (Index s = 0; s < probs_.rows(); ++s) {
    if (probs_.row(s).maxCoeff() != 1.0) return false;
  }
  return true;
}

Index Policy::action(Index s) const {
  Index best = 0;
  for (Index a = 1; a < probs_.cols(); ++a) {
    if (probs_(s, a) > probs_(s, best)) best = a;
  }
  return best;
}

std::vector<Index> Policy::actions() const {
  std::vector<Index> out(static_cast<std::size_t>(probs_.rows()));
  for (Index s = 0; s < probs_.rows(); ++s) out[static_cast<std::size_t>(s)] = action(s);
  return out;
}

}  // namespace hurl
