#include "hurl/learners.hpp"

#include <string>

#include "hurl/errors.hpp"
#include "hurl/solvers.hpp"

namespace hurl {
namespace {

double epsilon_at(const QLearnerConfig& cfg, long episode, long total) {
  if (total <= 1) return cfg.epsilon_start;
  const double frac = static_cast<double>(episode) / static_cast<double>(total - 1);
  return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac;
}

// Q table, visit counts and step counter shared by both training loops.
class QLearner {
 public:
  QLearner(const TabularMdp& mdp, const QLearnerConfig& cfg)
      : cfg_(cfg),
        q_{Matrix::Zero(mdp.n_states(), mdp.n_actions())},
        visits_(Matrix::Zero(mdp.n_states(), mdp.n_actions())) {}

  void reset() {
    q_.values.setZero();
    visits_.setZero();
  }

  double step_size(Index s, Index a) {
    visits_(s, a) += 1.0;
    return cfg_.step_size ? *cfg_.step_size : 1.0 / visits_(s, a);
  }

  QFn& q() noexcept { return q_; }

 private:
  const QLearnerConfig& cfg_;
  QFn q_;
  Matrix visits_;
};

CurvePoint record(const TabularMdp& mdp, const QFn& q, long iteration, double lambda,
                  long env_steps, long horizon) {
  const GreedyEvaluation eval = evaluate_greedy(mdp, q, horizon);
  return CurvePoint{iteration, lambda, eval.undiscounted, eval.discounted, env_steps};
}

}  // namespace

void QLearnerConfig::validate() const {
  if (step_size && !(*step_size > 0.0 && *step_size <= 1.0)) {
    throw DomainError("QLearnerConfig: step_size must lie in (0, 1]");
  }
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
      !(epsilon_end >= 0.0 && epsilon_end <= 1.0)) {
    throw DomainError("QLearnerConfig: epsilon must lie in [0, 1]");
  }
  if (episode_cutoff < 1) throw DomainError("QLearnerConfig: episode_cutoff must be >= 1");
}

void HurlRunConfig::validate(const TabularMdp& mdp) const {
  if (n_iterations < 1 || episodes_per_iteration < 1) {
    throw DomainError("HurlRunConfig: iteration and episode counts must be positive");
  }
  schedule.validate();
  if (schedule.horizon != n_iterations) {
    throw DomainError("HurlRunConfig: schedule horizon must equal n_iterations");
  }
  if (heuristic.size() != mdp.n_states()) {
    throw DimensionError("HurlRunConfig: heuristic length does not match state count");
  }
  hurl::validate(heuristic);
  learner.validate();
}

void q_learning_step(QFn& q, const Transition& tr, double gamma_tilde, double step_size) {
  const double bootstrap = tr.done ? 0.0 : q.values.row(tr.next_state).maxCoeff();
  const double target = tr.reward + gamma_tilde * bootstrap;
  double& entry = q.values(tr.state, tr.action);
  entry += step_size * (target - entry);
}

Index greedy_action(const QFn& q, Index state) {
  Index best = 0;
  for (Index a = 1; a < q.values.cols(); ++a) {
    if (q(state, a) > q(state, best)) best = a;
  }
  return best;
}

BehaviorRule epsilon_greedy(double epsilon) {
  return [epsilon](const QFn& q, Index state, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng) < epsilon) {
      return std::uniform_int_distribution<Index>(0, q.values.cols() - 1)(rng);
    }
    return greedy_action(q, state);
  };
}

BehaviorRule follow_policy(const Policy& pi) {
  return [pi](const QFn&, Index state, Rng& rng) { return sample_index(pi.probs().row(state), rng); };
}

Episode collect_episode(const TabularMdp& mdp, const QFn& q, const BehaviorRule& behavior,
                        long cutoff, Rng& rng) {
  if (cutoff < 1) throw DomainError("collect_episode: cutoff must be >= 1");
  Episode episode;
  Index s = sample_index(mdp.initial_dist(), rng);
  for (long t = 0; t < cutoff; ++t) {
    const Index a = behavior(q, s, rng);
    const Index next = sample_index(mdp.next_dist(s, a), rng);
    const bool done = mdp.is_absorbing(next);
    episode.push_back(Transition{s, a, mdp.reward()(s, a), next, done});
    if (done) break;
    s = next;
  }
  return episode;
}

GreedyEvaluation evaluate_greedy(const TabularMdp& mdp, const QFn& q, long horizon) {
  std::vector<Index> actions(static_cast<std::size_t>(mdp.n_states()));
  for (Index s = 0; s < mdp.n_states(); ++s) actions[static_cast<std::size_t>(s)] = greedy_action(q, s);
  Policy pi = Policy::deterministic(actions, mdp.n_actions());
  const double discounted = evaluate_policy(mdp, pi).at(mdp.initial_dist());
  const double undiscounted = undiscounted_return(mdp, pi, horizon);
  return GreedyEvaluation{std::move(pi), discounted, undiscounted};
}

TrainResult hurl_train(const TabularMdp& mdp, const HurlRunConfig& cfg) {
  cfg.validate(mdp);
  const QLearnerConfig& lc = cfg.learner;
  const double gamma = mdp.discount();
  const long total_episodes = cfg.n_iterations * cfg.episodes_per_iteration;

  Rng rng(lc.seed);
  QLearner learner(mdp, lc);
  LearningCurve curve;
  long episode_index = 0;
  long env_steps = 0;
  for (long n = 1; n <= cfg.n_iterations; ++n) {
    const double lambda = schedule_lambda(cfg.schedule, n);
    const double gamma_tilde = lambda * gamma;
    if (cfg.cold_restart) learner.reset();
    for (long e = 0; e < cfg.episodes_per_iteration; ++e, ++episode_index) {
      const BehaviorRule behavior = epsilon_greedy(epsilon_at(lc, episode_index, total_episodes));
      Episode episode = collect_episode(mdp, learner.q(), behavior, lc.episode_cutoff, rng);
      env_steps += static_cast<long>(episode.size());
      for (Transition& tr : episode) {
        tr.reward = reshape_transition_reward(tr.reward, tr.next_state, cfg.heuristic, gamma,
                                              gamma_tilde);
        q_learning_step(learner.q(), tr, gamma_tilde, learner.step_size(tr.state, tr.action));
      }
    }
    curve.push_back(record(mdp, learner.q(), n, lambda, env_steps, lc.episode_cutoff));
  }
  GreedyEvaluation final_eval = evaluate_greedy(mdp, learner.q(), lc.episode_cutoff);
  return TrainResult{std::move(final_eval.policy), learner.q(), std::move(curve)};
}

TrainResult vanilla_q_learning(const TabularMdp& mdp, const QLearnerConfig& lc, long n_iterations,
                               long episodes_per_iteration) {
  lc.validate();
  if (n_iterations < 1 || episodes_per_iteration < 1) {
    throw DomainError("vanilla_q_learning: iteration and episode counts must be positive");
  }
  const double gamma = mdp.discount();
  const long total_episodes = n_iterations * episodes_per_iteration;

  Rng rng(lc.seed);
  QLearner learner(mdp, lc);
  LearningCurve curve;
  long episode_index = 0;
  long env_steps = 0;
  for (long n = 1; n <= n_iterations; ++n) {
    for (long e = 0; e < episodes_per_iteration; ++e, ++episode_index) {
      const BehaviorRule behavior = epsilon_greedy(epsilon_at(lc, episode_index, total_episodes));
      const Episode episode = collect_episode(mdp, learner.q(), behavior, lc.episode_cutoff, rng);
      env_steps += static_cast<long>(episode.size());
      for (const Transition& tr : episode) {
        q_learning_step(learner.q(), tr, gamma, learner.step_size(tr.state, tr.action));
      }
    }
    curve.push_back(record(mdp, learner.q(), n, 1.0, env_steps, lc.episode_cutoff));
  }
  GreedyEvaluation final_eval = evaluate_greedy(mdp, learner.q(), lc.episode_cutoff);
  return TrainResult{std::move(final_eval.policy), learner.q(), std::move(curve)};
}

double area_under_curve(const LearningCurve& curve) {
  double total = 0.0;
  for (const CurvePoint& p : curve) total += p.return_discounted;
  return total;
}

}  // namespace hurl
