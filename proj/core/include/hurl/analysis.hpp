#pragma once

// Exact regret/bias decomposition of V*(d0) - V^pi(d0) for a reshaped MDP,
// the bounds on its bias term, and closed-form cross-checks of the
// performance-difference identities it rests on.
//
// Every expectation over trajectories is evaluated through an occupancy
// measure or a resolvent (I - eta P^pi)^{-1}; nothing here samples.

#include <utility>

#include "hurl/heuristics.hpp"
#include "hurl/mdp.hpp"

namespace hurl {

struct DecompositionComponents {
  double reshaped_gap_d0 = 0.0;         // V~*(d0) - V~pi(d0)
  double reshaped_gap_occupancy = 0.0;  // V~*(d^pi) - V~pi(d^pi)
  double optimal_gap_d0 = 0.0;          // V*(d0) - V~*(d0)
  double heuristic_gap = 0.0;           // E_{d^pi} E_{s'|s,a}[h(s') - V~*(s')]
};

struct DecompositionReport {
  double lambda = 0.0;
  double v_star_d0 = 0.0;
  double v_pi_d0 = 0.0;
  /// lambda (V~*(d0) - V~pi(d0)) + (1-lambda)/(1-gamma) (V~*(d^pi) - V~pi(d^pi))
  double regret = 0.0;
  /// (V*(d0) - V~*(d0)) + gamma (1-lambda)/(1-gamma) E_{d^pi}E[h(s') - V~*(s')]
  double bias = 0.0;
  /// Regret recomputed from the action gap of the reshaped MDP.
  double gap_identity_regret = 0.0;
  double bias_upper_bound_C = 0.0;
  double bias_upper_bound_linf = 0.0;
  /// inf_b ||h + b - V*||_inf
  double epsilon = 0.0;
  DecompositionComponents components;

  /// |regret + bias - (V*(d0) - V^pi(d0))|
  double identity_residual() const;
};

/// Populates every field of the report with exact solves.
DecompositionReport decompose(const TabularMdp& mdp, const Heuristic& h, double lambda,
                              const Policy& pi);

/// A~*(s,a) = r~(s,a) + gamma~ E[V~*(s')] - V~*(s), nonpositive up to rounding.
QFn reshaped_action_gap(const TabularMdp& mdp, const Heuristic& h, double lambda);

/// -(1/(1-gamma)) sum_{s,a} d^pi(s,a) A~*(s,a), with d^pi taken in the
/// original MDP.
double regret_via_action_gap(const TabularMdp& mdp, const Heuristic& h, double lambda,
                             const Policy& pi);

/// (1-lambda) gamma (C(pi*, V* - h, lambda gamma) + C(pi, h - V~*, gamma)).
/// Zero at lambda = 1.
double bias_bound_C(const TabularMdp& mdp, const Heuristic& h, double lambda, const Policy& pi);

/// inf_b ||h + b - v||_inf, attained at b = -(max(h-v) + min(h-v)) / 2.
double offset_linf_error(const Vector& h, const Vector& v);

/// (1 - lambda gamma)^2 / (1 - gamma)^2 * inf_b ||h + b - V*||_inf.
double bias_bound_linf(const TabularMdp& mdp, const Heuristic& h, double lambda);

/// (|Bias(h) - Bias(h+b)|, |Regret(h) - Regret(h+b)|).
std::pair<double, double> offset_invariance_check(const TabularMdp& mdp, const Heuristic& h,
                                                  double lambda, const Policy& pi, double b);

// Cross-checks. Each returns a residual (identities) or a violation
// (inequalities, positive means violated); the analysis is sound when they
// are at rounding level.

/// Classic PDL: V(d0) - V^pi(d0) = 1/(1-gamma) E_{d^pi}[V(s) - (BV)(s,a)].
double performance_difference_residual(const TabularMdp& mdp, const Policy& pi,
                                       const ValueFn& v);

/// General PDL for the reshaped MDP with an arbitrary V.
double general_pdl_check(const TabularMdp& mdp, const Heuristic& h, double lambda,
                         const Policy& pi, const ValueFn& v);

/// max_{s,a} |(BV - B~V)(s,a) - (1-lambda) gamma E[V(s') - h(s')]|.
double bellman_backup_difference_residual(const TabularMdp& mdp, const Heuristic& h,
                                          double lambda, const ValueFn& v);

/// max_s |V^pi - V~pi - (1-lambda) gamma P^pi (I - lambda gamma P^pi)^{-1} (V^pi - h)|.
double value_difference_residual(const TabularMdp& mdp, const Heuristic& h, double lambda,
                                 const Policy& pi);

/// Largest violation of
///   -eps_l - (1-lambda) gamma eps_u / (1 - lambda gamma) <= h - V~pi
///                                  <= eps_u + (1-lambda) gamma eps_l / (1 - lambda gamma)
/// where -eps_l <= h - V^pi <= eps_u are the tightest constants. <= 0 holds.
double value_change_violation(const TabularMdp& mdp, const Heuristic& h, double lambda,
                              const Policy& pi);

/// |1/(1-gamma) E_{d^pi}[V - B~V] - lambda (V(d0) - V~pi(d0))
///   - (1-lambda)/(1-gamma) (V(d^pi) - V~pi(d^pi))|.
double online_value_difference_residual(const TabularMdp& mdp, const Heuristic& h,
                                        double lambda, const Policy& pi, const ValueFn& v);

}  // namespace hurl
