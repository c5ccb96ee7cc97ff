#pragma once

// Heuristic-guided reshaping of an MDP:
//
//   r~(s,a) = r(s,a) + (1 - lambda) gamma E_{s'|s,a}[h(s')],   gamma~ = lambda gamma
//
// together with the potential-based baseline r-(s,a) = r + gamma E[h(s')] - h(s)
// and the mixing-coefficient schedules that drive lambda towards 1.

#include "hurl/heuristics.hpp"
#include "hurl/mdp.hpp"

namespace hurl {

/// The reshaped MDP together with the (base, h, lambda) it was built from.
/// The materialized MDP shares the base kernel and d0; its reward range is
/// the observed [min, max] of r~, which may leave [0, 1].
class ReshapedMdp {
 public:
  ReshapedMdp(TabularMdp base, Heuristic heuristic, double lambda);

  const TabularMdp& base() const noexcept { return base_; }
  const Heuristic& heuristic() const noexcept { return heuristic_; }
  double lambda() const noexcept { return lambda_; }
  const TabularMdp& materialized() const noexcept { return materialized_; }

  double guidance_discount() const noexcept { return materialized_.discount(); }
  const Matrix& reward() const noexcept { return materialized_.reward(); }

 private:
  TabularMdp base_;
  Heuristic heuristic_;
  double lambda_;
  TabularMdp materialized_;
};

/// Throws DomainError unless 0 <= lambda <= 1.
ReshapedMdp hurl_reshape(const TabularMdp& mdp, const Heuristic& h, double lambda);

/// Sample-level reshaping of a collected tuple: r + (gamma - gamma~) h(s').
double reshape_transition_reward(double reward, Index next_state, const Heuristic& h,
                                 double gamma, double gamma_tilde);

/// Potential-based shaping at the original discount.
TabularMdp pbrs_reshape(const TabularMdp& mdp, const Heuristic& h);

/// Potential-based shaping with the guidance discount lambda * gamma.
TabularMdp pbrs_lambda_reshape(const TabularMdp& mdp, const Heuristic& h, double lambda);

/// Mixing-coefficient schedule over iterations n = 1..N.
///
/// tanh kind: lambda_n = lambda0 + (1 - lambda0) tanh(omega (n - 1)) / 0.99 with
/// omega = atanh(0.99) / (alpha N - 1), so lambda_N = 1 exactly when alpha = 1;
/// larger alpha slows the ramp, alpha = 1e5 keeps lambda_n ~ lambda0. The
/// result is clamped to [0, 1] (alpha < 1 reaches 1 before n = N).
struct LambdaSchedule {
  enum class Kind { tanh, constant };

  double lambda0 = 1.0;
  double alpha = 1.0;
  long horizon = 1;  // N
  Kind kind = Kind::constant;

  static LambdaSchedule constant(double lambda, long horizon);
  static LambdaSchedule tanh(double lambda0, double alpha, long horizon);

  /// Throws DomainError on an invalid parameterization (including
  /// alpha * N <= 1 for the tanh kind, where the ramp is undefined).
  void validate() const;
};

double schedule_lambda(const LambdaSchedule& sched, long n);

}  // namespace hurl
