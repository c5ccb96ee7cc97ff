#include "hurl/reshaping.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hurl/errors.hpp"

namespace hurl {
namespace {

void require_lambda(double lambda, const char* op) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError(std::string(op) + ": lambda must lie in [0, 1], got " +
                      std::to_string(lambda));
  }
}

void require_heuristic(const TabularMdp& mdp, const Heuristic& h, const char* op) {
  if (h.size() != mdp.n_states()) {
    throw DimensionError(std::string(op) + ": heuristic length does not match state count");
  }
  validate(h);
}

RewardRange observed_range(const Matrix& reward) {
  return RewardRange{reward.minCoeff(), reward.maxCoeff()};
}

TabularMdp shaped(const TabularMdp& mdp, const Heuristic& h, double discount) {
  const Index m = mdp.n_actions();
  Matrix reward = mdp.reward() + mdp.discount() * mdp.expected_next(h.values) -
                  h.values.replicate(1, m);
  const RewardRange range = observed_range(reward);
  return mdp.with_reward(std::move(reward), discount, range);
}

constexpr double kRampTarget = 0.99;

}  // namespace

ReshapedMdp::ReshapedMdp(TabularMdp base, Heuristic heuristic, double lambda)
    : base_(std::move(base)),
      heuristic_(std::move(heuristic)),
      lambda_(lambda),
      materialized_(base_) {
  require_lambda(lambda_, "hurl_reshape");
  require_heuristic(base_, heuristic_, "hurl_reshape");
  const double gamma = base_.discount();
  Matrix reward = base_.reward();
  if (lambda_ != 1.0) reward += (1.0 - lambda_) * gamma * base_.expected_next(heuristic_.values);
  const RewardRange range = observed_range(reward);
  materialized_ = base_.with_reward(std::move(reward), lambda_ * gamma, range);
}

ReshapedMdp hurl_reshape(const TabularMdp& mdp, const Heuristic& h, double lambda) {
  return ReshapedMdp(mdp, h, lambda);
}

double reshape_transition_reward(double reward, Index next_state, const Heuristic& h,
                                 double gamma, double gamma_tilde) {
  return reward + (gamma - gamma_tilde) * h(next_state);
}

TabularMdp pbrs_reshape(const TabularMdp& mdp, const Heuristic& h) {
  require_heuristic(mdp, h, "pbrs_reshape");
  return shaped(mdp, h, mdp.discount());
}

TabularMdp pbrs_lambda_reshape(const TabularMdp& mdp, const Heuristic& h, double lambda) {
  require_lambda(lambda, "pbrs_lambda_reshape");
  require_heuristic(mdp, h, "pbrs_lambda_reshape");
  return shaped(mdp, h, lambda * mdp.discount());
}

LambdaSchedule LambdaSchedule::constant(double lambda, long horizon) {
  LambdaSchedule s{lambda, 1.0, horizon, Kind::constant};
  s.validate();
  return s;
}

LambdaSchedule LambdaSchedule::tanh(double lambda0, double alpha, long horizon) {
  LambdaSchedule s{lambda0, alpha, horizon, Kind::tanh};
  s.validate();
  return s;
}

void LambdaSchedule::validate() const {
  require_lambda(lambda0, "LambdaSchedule");
  if (horizon < 1) throw DomainError("LambdaSchedule: horizon N must be >= 1");
  if (kind == Kind::tanh) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw DomainError("LambdaSchedule: alpha must be positive and finite");
    }
    if (alpha * static_cast<double>(horizon) <= 1.0 + 1e-9) {
      throw DomainError("LambdaSchedule: tanh ramp needs alpha * N > 1");
    }
  }
}

double schedule_lambda(const LambdaSchedule& sched, long n) {
  sched.validate();
  if (n < 1 || n > sched.horizon) {
    throw DomainError("schedule_lambda: n = " + std::to_string(n) + " outside [1, " +
                      std::to_string(sched.horizon) + "]");
  }
  if (sched.kind == LambdaSchedule::Kind::constant) return sched.lambda0;

  const double omega =
      std::atanh(kRampTarget) / (sched.alpha * static_cast<double>(sched.horizon) - 1.0);
  // tanh saturates long before its argument overflows; the clamp keeps
  // extreme alpha (1e-5) finite.
  const double arg = std::min(omega * static_cast<double>(n - 1), 50.0);
  const double lambda = sched.lambda0 + (1.0 - sched.lambda0) * std::tanh(arg) / kRampTarget;
  return std::clamp(lambda, 0.0, 1.0);
}

}  // namespace hurl
