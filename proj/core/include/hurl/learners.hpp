#pragma once

// Tabular Q-learning and the heuristic-guided outer loop that drives it.
//
// Data are always collected in the original MDP. Each iteration n picks
// lambda_n from the schedule, rewrites every collected reward to
// r + (gamma - lambda_n gamma) h(s'), and runs Q-learning updates with the
// guidance discount lambda_n gamma.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hurl/envs.hpp"
#include "hurl/heuristics.hpp"
#include "hurl/mdp.hpp"
#include "hurl/reshaping.hpp"

namespace hurl {

struct QLearnerConfig {
  /// Constant step size in (0, 1]; nullopt selects 1 / N(s,a).
  std::optional<double> step_size;
  /// Exploration decays linearly from epsilon_start (first episode) to
  /// epsilon_end (last episode of the run).
  double epsilon_start = 0.3;
  double epsilon_end = 0.05;
  long episode_cutoff = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

struct HurlRunConfig {
  long n_iterations = 1;
  long episodes_per_iteration = 1;
  LambdaSchedule schedule;
  Heuristic heuristic;
  QLearnerConfig learner;
  /// Reset Q to zero at the start of every iteration instead of continuing.
  bool cold_restart = false;

  void validate(const TabularMdp& mdp) const;
};

struct CurvePoint {
  long iteration = 0;
  double lambda = 1.0;
  double return_undiscounted = 0.0;
  double return_discounted = 0.0;
  long env_steps = 0;  // cumulative
};

using LearningCurve = std::vector<CurvePoint>;

struct TrainResult {
  Policy policy;
  QFn q;
  LearningCurve curve;
};

/// Moves Q(s,a) towards r + gamma_tilde max_a' Q(s',a') (no bootstrap when
/// done). Only entry (s,a) changes.
void q_learning_step(QFn& q, const Transition& transition, double gamma_tilde,
                     double step_size);

/// Picks an action for the current state.
using BehaviorRule = std::function<Index(const QFn& q, Index state, Rng& rng)>;

BehaviorRule epsilon_greedy(double epsilon);
BehaviorRule follow_policy(const Policy& pi);

/// Greedy action with lowest-index ties.
Index greedy_action(const QFn& q, Index state);

/// Samples an index from a probability row.
template <typename Row>
Index sample_index(const Row& probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  Index last = 0;
  for (Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    acc += probs(i);
    last = i;
    if (u < acc) return i;
  }
  return last;
}

/// One episode in `mdp` starting from s0 ~ d0. Ends when the next state is
/// absorbing (the last tuple is marked done) or after `cutoff` steps.
Episode collect_episode(const TabularMdp& mdp, const QFn& q, const BehaviorRule& behavior,
                        long cutoff, Rng& rng);

struct GreedyEvaluation {
  Policy policy;
  double discounted = 0.0;    // V^pi(d0), exact
  double undiscounted = 0.0;  // expected sum of the first `horizon` rewards, exact
};

GreedyEvaluation evaluate_greedy(const TabularMdp& mdp, const QFn& q, long horizon);

/// Runs the heuristic-guided loop; one curve point per iteration.
TrainResult hurl_train(const TabularMdp& mdp, const HurlRunConfig& cfg);

/// Plain Q-learning on the original MDP with the same episode budget,
/// exploration and RNG stream as hurl_train. Shares no reshaping code.
TrainResult vanilla_q_learning(const TabularMdp& mdp, const QLearnerConfig& learner,
                               long n_iterations, long episodes_per_iteration);

/// Sum of return_discounted over the curve.
double area_under_curve(const LearningCurve& curve);

}  // namespace hurl
