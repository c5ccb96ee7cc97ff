#pragma once

// Heuristic value guesses h: S -> R, the offline datasets they are built
// from, and the two audits that predict whether a heuristic is safe to use
// (improvability and Bellman-consistent pessimism).

#include <string_view>
#include <vector>

#include "hurl/mdp.hpp"

namespace hurl {

enum class Provenance { zero, policy_value, monte_carlo, pessimistic, engineered, loaded };

std::string_view to_string(Provenance p);
/// Throws DomainError on an unknown name.
Provenance provenance_from_string(std::string_view name);

struct Heuristic {
  Vector values;
  Provenance provenance = Provenance::engineered;

  Index size() const noexcept { return values.size(); }
  double operator()(Index s) const { return values(s); }

  /// h + b, provenance kept.
  Heuristic shifted(double b) const;
};

/// Throws InvalidModelError on non-finite entries.
void validate(const Heuristic& h);

struct Transition {
  Index state = 0;
  Index action = 0;
  double reward = 0.0;
  Index next_state = 0;
  bool done = false;

  bool operator==(const Transition&) const = default;
};

using Episode = std::vector<Transition>;

struct TransitionDataset {
  Index n_states = 0;
  Index n_actions = 0;
  std::vector<Episode> episodes;

  std::size_t n_transitions() const;
  bool operator==(const TransitionDataset&) const = default;
};

/// Index ranges against the declared shape; rewards against `range`.
void validate(const TransitionDataset& data, const RewardRange& range);

Heuristic zero_heuristic(Index n_states);

/// h = V^pi, exact.
Heuristic policy_value_heuristic(const TabularMdp& mdp, const Policy& pi);

/// Per-state mean of the within-episode discounted return-to-go
/// sum_{k>=0} gamma^k r_{t+k}, over every occurrence of the state. States
/// never seen get `unvisited`. A state seen once keeps its single-sample
/// estimate, so its variance is that of one return.
Heuristic monte_carlo_heuristic(const TransitionDataset& data, double gamma,
                                double unvisited = 0.0);

/// Value iteration on the count-based empirical model with hard
/// thresholding: Q(s,a) is pinned to reward_floor / (1 - gamma) whenever
/// (s,a) was seen fewer than min_count times. h(s) = max_a Q(s,a).
/// An empty dataset yields the floor everywhere.
Heuristic pessimistic_heuristic(const TransitionDataset& data, double gamma, long min_count = 1,
                                double reward_floor = 0.0);

struct ImprovabilityReport {
  bool improvable = false;
  Index worst_state = 0;
  /// max_s h(s) - max_a (Bh)(s,a); <= tol when improvable.
  double violation = 0.0;
};

/// Checks max_a (Bh)(s,a) >= h(s) - tol for every state.
ImprovabilityReport is_improvable(const TabularMdp& mdp, const Heuristic& h, double tol = 1e-9);

struct PessimismCheck {
  bool passed = false;
  /// h(s) = sum_a pi'(a|s) Q(s,a)
  Heuristic heuristic;
  /// max_{s,a} Q(s,a) - (Bh)(s,a)
  double max_violation = 0.0;
};

/// Forms h = Q(., pi') and verifies Q(s,a) <= (Bh)(s,a) + tol everywhere.
PessimismCheck check_bellman_pessimism(const TabularMdp& mdp, const QFn& q,
                                       const Policy& pi_prime, double tol = 1e-9);

}  // namespace hurl
