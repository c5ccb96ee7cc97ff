#pragma once

// Exact policy evaluation, occupancy measures, Bellman backups and the two
// optimal-control solvers. Closed forms go through a dense LU solve.

#include "hurl/mdp.hpp"

namespace hurl {

/// P^pi(s, s') = sum_a pi(a|s) P(s'|s,a).
Matrix policy_transition(const TabularMdp& mdp, const Policy& pi);
/// r^pi(s) = sum_a pi(a|s) r(s,a).
Vector policy_reward(const TabularMdp& mdp, const Policy& pi);

/// Solves (I - gamma P^pi) V = r^pi.
ValueFn evaluate_policy(const TabularMdp& mdp, const Policy& pi);

/// Bellman backup (BV)(s,a) = r(s,a) + gamma E_{s'|s,a}[v(s')].
QFn q_from_v(const TabularMdp& mdp, const ValueFn& v);

/// V(s) = sum_a pi(a|s) Q(s,a).
ValueFn v_from_q(const QFn& q, const Policy& pi);

/// max_s |max_a (BV)(s,a) - V(s)|.
double bellman_residual(const TabularMdp& mdp, const ValueFn& v);

/// Deterministic greedy policy. An action counts as maximal when it is within
/// tie_tol * max(1, |max_a Q(s,a)|) of the maximum; the lowest such index wins.
Policy greedy_policy(const QFn& q, double tie_tol = 1e-12);

struct Solution {
  ValueFn value;
  Policy policy;
  QFn q;
  long iterations = 0;
  double residual = 0.0;  // Bellman residual of `value`
};

inline constexpr double kDefaultVITol = 1e-10;
inline constexpr long kDefaultVIMaxIters = 100000;

/// Iterates V <- max_a BV from V = 0 until successive iterates differ by at
/// most tol; the returned V then has Bellman residual <= gamma * tol.
/// Throws ConvergenceError carrying the last residual otherwise.
Solution value_iteration(const TabularMdp& mdp, double tol = kDefaultVITol,
                         long max_iters = kDefaultVIMaxIters);

/// Howard policy iteration with exact evaluation. Terminates with a policy
/// whose greedy improvement is below rounding; values are exact up to the LU
/// solve, which is what the analysis module relies on.
Solution policy_iteration(const TabularMdp& mdp, long max_iters = 10000);

/// Solves (I - gamma P^pi^T) x = (1 - gamma) d0.
OccupancyMeasure occupancy(const TabularMdp& mdp, const Policy& pi);

/// C(pi, g, eta) = E_{rho^pi(d0)}[sum_{t>=1} eta^{t-1} g(s_t)]
///              = d0^T P^pi (I - eta P^pi)^{-1} g,  eta in [0, 1).
double discounted_state_functional(const TabularMdp& mdp, const Policy& pi, const Vector& g,
                                   double eta);

/// Expected undiscounted reward collected over the first `horizon` steps
/// from d0, computed by forward propagation of the state distribution.
double undiscounted_return(const TabularMdp& mdp, const Policy& pi, long horizon);

}  // namespace hurl
