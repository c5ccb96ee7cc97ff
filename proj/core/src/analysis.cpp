#include "hurl/analysis.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

#include "hurl/errors.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"

namespace hurl {
namespace {

void require_shapes(const TabularMdp& mdp, const Heuristic& h, const Policy* pi,
                    const char* op) {
  if (h.size() != mdp.n_states()) {
    throw DimensionError(std::string(op) + ": heuristic length does not match state count");
  }
  if (pi != nullptr && (pi->n_states() != mdp.n_states() || pi->n_actions() != mdp.n_actions())) {
    throw DimensionError(std::string(op) + ": policy shape does not match MDP");
  }
}

// E_{(s,a)~d}[f(s,a)] for a joint occupancy d and an S x A table f.
double expect(const Matrix& joint, const Matrix& table) { return joint.cwiseProduct(table).sum(); }

// Everything the decomposition needs for one (M, h, lambda, pi).
struct Quantities {
  ReshapedMdp reshaped;
  Solution original_opt;
  Solution reshaped_opt;
  ValueFn v_pi;
  ValueFn v_tilde_pi;
  OccupancyMeasure occ;

  Quantities(const TabularMdp& mdp, const Heuristic& h, double lambda, const Policy& pi)
      : reshaped(hurl_reshape(mdp, h, lambda)),
        original_opt(policy_iteration(mdp)),
        reshaped_opt(policy_iteration(reshaped.materialized())),
        v_pi(evaluate_policy(mdp, pi)),
        v_tilde_pi(evaluate_policy(reshaped.materialized(), pi)),
        occ(occupancy(mdp, pi)) {}
};

double regret_of(const Quantities& q, double gamma, double lambda,
                 DecompositionComponents* parts) {
  const Vector& d0 = q.reshaped.base().initial_dist();
  const double gap_d0 = q.reshaped_opt.value.at(d0) - q.v_tilde_pi.at(d0);
  const double gap_occ = q.reshaped_opt.value.at(q.occ.state_dist) - q.v_tilde_pi.at(q.occ.state_dist);
  if (parts != nullptr) {
    parts->reshaped_gap_d0 = gap_d0;
    parts->reshaped_gap_occupancy = gap_occ;
  }
  return lambda * gap_d0 + (1.0 - lambda) / (1.0 - gamma) * gap_occ;
}

double bias_of(const Quantities& q, double gamma, double lambda, DecompositionComponents* parts) {
  const TabularMdp& mdp = q.reshaped.base();
  const Vector& d0 = mdp.initial_dist();
  const double opt_gap = q.original_opt.value.at(d0) - q.reshaped_opt.value.at(d0);
  const Vector diff = q.reshaped.heuristic().values - q.reshaped_opt.value.values;
  const double heuristic_gap = expect(q.occ.state_action_dist, mdp.expected_next(diff));
  if (parts != nullptr) {
    parts->optimal_gap_d0 = opt_gap;
    parts->heuristic_gap = heuristic_gap;
  }
  return opt_gap + gamma * (1.0 - lambda) / (1.0 - gamma) * heuristic_gap;
}

double action_gap_regret(const Quantities& q, double gamma) {
  const TabularMdp& reshaped = q.reshaped.materialized();
  const Matrix backup = q_from_v(reshaped, q.reshaped_opt.value).values;
  const Matrix gap = backup - q.reshaped_opt.value.values.replicate(1, reshaped.n_actions());
  return -expect(q.occ.state_action_dist, gap) / (1.0 - gamma);
}

double c_bound(const Quantities& q, double gamma, double lambda, const Policy& pi) {
  if (lambda == 1.0) return 0.0;
  const TabularMdp& mdp = q.reshaped.base();
  const Vector& h = q.reshaped.heuristic().values;
  const double underestimation = discounted_state_functional(
      mdp, q.original_opt.policy, q.original_opt.value.values - h, lambda * gamma);
  const double overshoot =
      discounted_state_functional(mdp, pi, h - q.reshaped_opt.value.values, gamma);
  return (1.0 - lambda) * gamma * (underestimation + overshoot);
}

double linf_bound(double epsilon, double gamma, double lambda) {
  const double ratio = (1.0 - lambda * gamma) / (1.0 - gamma);
  return ratio * ratio * epsilon;
}

// (I - eta P^pi)^{-1} g
Vector resolvent(const Matrix& p_pi, const Vector& g, double eta) {
  const Index n = p_pi.rows();
  return (Matrix::Identity(n, n) - eta * p_pi).partialPivLu().solve(g);
}

}  // namespace

double DecompositionReport::identity_residual() const {
  return std::abs(regret + bias - (v_star_d0 - v_pi_d0));
}

DecompositionReport decompose(const TabularMdp& mdp, const Heuristic& h, double lambda,
                              const Policy& pi) {
  require_shapes(mdp, h, &pi, "decompose");
  const Quantities q(mdp, h, lambda, pi);
  const double gamma = mdp.discount();
  const Vector& d0 = mdp.initial_dist();

  DecompositionReport report;
  report.lambda = lambda;
  report.v_star_d0 = q.original_opt.value.at(d0);
  report.v_pi_d0 = q.v_pi.at(d0);
  report.regret = regret_of(q, gamma, lambda, &report.components);
  report.bias = bias_of(q, gamma, lambda, &report.components);
  report.gap_identity_regret = action_gap_regret(q, gamma);
  report.bias_upper_bound_C = c_bound(q, gamma, lambda, pi);
  report.epsilon = offset_linf_error(h.values, q.original_opt.value.values);
  report.bias_upper_bound_linf = linf_bound(report.epsilon, gamma, lambda);
  return report;
}

QFn reshaped_action_gap(const TabularMdp& mdp, const Heuristic& h, double lambda) {
  require_shapes(mdp, h, nullptr, "reshaped_action_gap");
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const Solution opt = policy_iteration(reshaped.materialized());
  const Matrix backup = q_from_v(reshaped.materialized(), opt.value).values;
  return QFn{backup - opt.value.values.replicate(1, mdp.n_actions())};
}

double regret_via_action_gap(const TabularMdp& mdp, const Heuristic& h, double lambda,
                             const Policy& pi) {
  require_shapes(mdp, h, &pi, "regret_via_action_gap");
  const QFn gap = reshaped_action_gap(mdp, h, lambda);
  return -expect(occupancy(mdp, pi).state_action_dist, gap.values) / (1.0 - mdp.discount());
}

double bias_bound_C(const TabularMdp& mdp, const Heuristic& h, double lambda, const Policy& pi) {
  require_shapes(mdp, h, &pi, "bias_bound_C");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("bias_bound_C: lambda outside [0, 1]");
  if (lambda == 1.0) return 0.0;
  return c_bound(Quantities(mdp, h, lambda, pi), mdp.discount(), lambda, pi);
}

double offset_linf_error(const Vector& h, const Vector& v) {
  if (h.size() != v.size()) throw DimensionError("offset_linf_error: length mismatch");
  const Vector diff = h - v;
  return 0.5 * (diff.maxCoeff() - diff.minCoeff());
}

double bias_bound_linf(const TabularMdp& mdp, const Heuristic& h, double lambda) {
  require_shapes(mdp, h, nullptr, "bias_bound_linf");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw DomainError("bias_bound_linf: lambda outside [0, 1]");
  }
  const double epsilon = offset_linf_error(h.values, policy_iteration(mdp).value.values);
  return linf_bound(epsilon, mdp.discount(), lambda);
}

std::pair<double, double> offset_invariance_check(const TabularMdp& mdp, const Heuristic& h,
                                                  double lambda, const Policy& pi, double b) {
  const DecompositionReport base = decompose(mdp, h, lambda, pi);
  const DecompositionReport moved = decompose(mdp, h.shifted(b), lambda, pi);
  return {std::abs(base.bias - moved.bias), std::abs(base.regret - moved.regret)};
}

double performance_difference_residual(const TabularMdp& mdp, const Policy& pi,
                                       const ValueFn& v) {
  const double gamma = mdp.discount();
  const Vector& d0 = mdp.initial_dist();
  const OccupancyMeasure occ = occupancy(mdp, pi);
  const Matrix backup = q_from_v(mdp, v).values;
  const Matrix advantage = v.values.replicate(1, mdp.n_actions()) - backup;
  const double lhs = v.at(d0) - evaluate_policy(mdp, pi).at(d0);
  const double rhs = expect(occ.state_action_dist, advantage) / (1.0 - gamma);
  return std::abs(lhs - rhs);
}

double general_pdl_check(const TabularMdp& mdp, const Heuristic& h, double lambda,
                         const Policy& pi, const ValueFn& v) {
  require_shapes(mdp, h, &pi, "general_pdl_check");
  const double gamma = mdp.discount();
  const Vector& d0 = mdp.initial_dist();
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const OccupancyMeasure occ = occupancy(mdp, pi);
  const ValueFn v_pi = evaluate_policy(mdp, pi);
  const ValueFn v_tilde_pi = evaluate_policy(reshaped.materialized(), pi);

  const double lhs = v.at(d0) - v_pi.at(d0);
  const double heuristic_term = gamma * (1.0 - lambda) / (1.0 - gamma) *
                                expect(occ.state_action_dist, mdp.expected_next(h.values - v.values));
  const double start_term = lambda * (v.at(d0) - v_tilde_pi.at(d0));
  const double occupancy_term =
      (1.0 - lambda) / (1.0 - gamma) * (v.at(occ.state_dist) - v_tilde_pi.at(occ.state_dist));
  return std::abs(lhs - (heuristic_term + start_term + occupancy_term));
}

double bellman_backup_difference_residual(const TabularMdp& mdp, const Heuristic& h,
                                          double lambda, const ValueFn& v) {
  require_shapes(mdp, h, nullptr, "bellman_backup_difference_residual");
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const Matrix lhs = q_from_v(mdp, v).values - q_from_v(reshaped.materialized(), v).values;
  const Matrix rhs = (1.0 - lambda) * mdp.discount() * mdp.expected_next(v.values - h.values);
  return (lhs - rhs).cwiseAbs().maxCoeff();
}

double value_difference_residual(const TabularMdp& mdp, const Heuristic& h, double lambda,
                                 const Policy& pi) {
  require_shapes(mdp, h, &pi, "value_difference_residual");
  const double gamma = mdp.discount();
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const Vector v_pi = evaluate_policy(mdp, pi).values;
  const Vector v_tilde_pi = evaluate_policy(reshaped.materialized(), pi).values;
  const Matrix p_pi = policy_transition(mdp, pi);
  const Vector closed_form =
      (1.0 - lambda) * gamma * (p_pi * resolvent(p_pi, v_pi - h.values, lambda * gamma));
  return ((v_pi - v_tilde_pi) - closed_form).cwiseAbs().maxCoeff();
}

double value_change_violation(const TabularMdp& mdp, const Heuristic& h, double lambda,
                              const Policy& pi) {
  require_shapes(mdp, h, &pi, "value_change_violation");
  const double gamma = mdp.discount();
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const Vector v_pi = evaluate_policy(mdp, pi).values;
  const Vector v_tilde_pi = evaluate_policy(reshaped.materialized(), pi).values;
  const Vector h_minus_v = h.values - v_pi;
  const double eps_u = h_minus_v.maxCoeff();
  const double eps_l = -h_minus_v.minCoeff();
  const double k = (1.0 - lambda) * gamma / (1.0 - lambda * gamma);
  const double lower = -eps_l - k * eps_u;
  const double upper = eps_u + k * eps_l;
  const Vector gap = h.values - v_tilde_pi;
  return std::max(lower - gap.minCoeff(), gap.maxCoeff() - upper);
}

double online_value_difference_residual(const TabularMdp& mdp, const Heuristic& h,
                                        double lambda, const Policy& pi, const ValueFn& v) {
  require_shapes(mdp, h, &pi, "online_value_difference_residual");
  const double gamma = mdp.discount();
  const Vector& d0 = mdp.initial_dist();
  const ReshapedMdp reshaped = hurl_reshape(mdp, h, lambda);
  const OccupancyMeasure occ = occupancy(mdp, pi);
  const ValueFn v_tilde_pi = evaluate_policy(reshaped.materialized(), pi);
  const Matrix reshaped_backup = q_from_v(reshaped.materialized(), v).values;
  const double lhs =
      expect(occ.state_action_dist, v.values.replicate(1, mdp.n_actions()) - reshaped_backup) /
      (1.0 - gamma);
  const double rhs = lambda * (v.at(d0) - v_tilde_pi.at(d0)) +
                     (1.0 - lambda) / (1.0 - gamma) *
                         (v.at(occ.state_dist) - v_tilde_pi.at(occ.state_dist));
  return std::abs(lhs - rhs);
}

}  // namespace hurl
