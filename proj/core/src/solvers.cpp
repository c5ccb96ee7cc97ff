#include "hurl/solvers.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

#include "hurl/errors.hpp"

namespace hurl {
namespace {

void require_policy_shape(const TabularMdp& mdp, const Policy& pi, const char* op) {
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw DimensionError(std::string(op) + ": policy is " + std::to_string(pi.n_states()) + "x" +
                         std::to_string(pi.n_actions()) + ", MDP is " +
                         std::to_string(mdp.n_states()) + "x" + std::to_string(mdp.n_actions()));
  }
}

void require_state_vector(const TabularMdp& mdp, const Vector& v, const char* op) {
  if (v.size() != mdp.n_states()) {
    throw DimensionError(std::string(op) + ": vector has " + std::to_string(v.size()) +
                         " entries, MDP has " + std::to_string(mdp.n_states()) + " states");
  }
}

Vector greedy_max(const Matrix& q) { return q.rowwise().maxCoeff(); }

}  // namespace

Matrix policy_transition(const TabularMdp& mdp, const Policy& pi) {
  require_policy_shape(mdp, pi, "policy_transition");
  const Index n = mdp.n_states();
  Matrix p = Matrix::Zero(n, n);
  for (Index s = 0; s < n; ++s) {
    for (Index a = 0; a < mdp.n_actions(); ++a) {
      const double w = pi(s, a);
      if (w != 0.0) p.row(s) += w * mdp.next_dist(s, a);
    }
  }
  return p;
}

Vector policy_reward(const TabularMdp& mdp, const Policy& pi) {
  require_policy_shape(mdp, pi, "policy_reward");
  return mdp.reward().cwiseProduct(pi.probs()).rowwise().sum();
}

ValueFn evaluate_policy(const TabularMdp& mdp, const Policy& pi) {
  const Matrix p = policy_transition(mdp, pi);
  const Index n = mdp.n_states();
  const Matrix system = Matrix::Identity(n, n) - mdp.discount() * p;
  Vector v = system.partialPivLu().solve(policy_reward(mdp, pi));
  // V = 0 + gamma V has the single solution 0; keep it free of LU round-off.
  for (Index s = 0; s < n; ++s) {
    if (mdp.is_absorbing(s)) v(s) = 0.0;
  }
  return ValueFn{std::move(v)};
}

QFn q_from_v(const TabularMdp& mdp, const ValueFn& v) {
  require_state_vector(mdp, v.values, "q_from_v");
  return QFn{mdp.reward() + mdp.discount() * mdp.expected_next(v.values)};
}

ValueFn v_from_q(const QFn& q, const Policy& pi) {
  if (q.values.rows() != pi.n_states() || q.values.cols() != pi.n_actions()) {
    throw DimensionError("v_from_q: Q and policy shapes differ");
  }
  return ValueFn{q.values.cwiseProduct(pi.probs()).rowwise().sum()};
}

double bellman_residual(const TabularMdp& mdp, const ValueFn& v) {
  const QFn q = q_from_v(mdp, v);
  return (greedy_max(q.values) - v.values).cwiseAbs().maxCoeff();
}

Policy greedy_policy(const QFn& q, double tie_tol) {
  std::vector<Index> actions(static_cast<std::size_t>(q.values.rows()));
  for (Index s = 0; s < q.values.rows(); ++s) {
    const double best = q.values.row(s).maxCoeff();
    const double slack = tie_tol * std::max(1.0, std::abs(best));
    Index pick = 0;
    while (q.values(s, pick) < best - slack) ++pick;
    actions[static_cast<std::size_t>(s)] = pick;
  }
  return Policy::deterministic(actions, q.values.cols());
}

Solution value_iteration(const TabularMdp& mdp, double tol, long max_iters) {
  if (!(tol > 0.0)) throw DomainError("value_iteration: tol must be positive");
  if (max_iters <= 0) throw DomainError("value_iteration: max_iters must be positive");

  ValueFn v{Vector::Zero(mdp.n_states())};
  double delta = 0.0;
  for (long k = 1; k <= max_iters; ++k) {
    Vector next = greedy_max(q_from_v(mdp, v).values);
    delta = (next - v.values).cwiseAbs().maxCoeff();
    v.values = std::move(next);
    if (delta <= tol) {
      QFn q = q_from_v(mdp, v);
      const double residual = (greedy_max(q.values) - v.values).cwiseAbs().maxCoeff();
      Policy pi = greedy_policy(q);
      return Solution{std::move(v), std::move(pi), std::move(q), k, residual};
    }
  }
  throw ConvergenceError("value_iteration: no convergence after " + std::to_string(max_iters) +
                             " iterations (last change " + std::to_string(delta) + ")",
                         delta, max_iters);
}

Solution policy_iteration(const TabularMdp& mdp, long max_iters) {
  if (max_iters <= 0) throw DomainError("policy_iteration: max_iters must be positive");

  Policy pi = greedy_policy(QFn{mdp.reward()});
  std::vector<Index> actions = pi.actions();
  for (long k = 1; k <= max_iters; ++k) {
    ValueFn v = evaluate_policy(mdp, pi);
    QFn q = q_from_v(mdp, v);

    bool changed = false;
    for (Index s = 0; s < mdp.n_states(); ++s) {
      const auto su = static_cast<std::size_t>(s);
      const double current = q(s, actions[su]);
      const double best = q.values.row(s).maxCoeff();
      // Switch only on a strict improvement beyond rounding, else PI can cycle
      // between tied actions.
      if (best > current + 1e-12 * std::max(1.0, std::abs(current))) {
        Index pick = 0;
        while (q(s, pick) < best) ++pick;
        actions[su] = pick;
        changed = true;
      }
    }
    if (!changed) {
      const double residual = (greedy_max(q.values) - v.values).cwiseAbs().maxCoeff();
      Policy greedy = greedy_policy(q);
      return Solution{std::move(v), std::move(greedy), std::move(q), k, residual};
    }
    pi = Policy::deterministic(actions, mdp.n_actions());
  }
  throw ConvergenceError("policy_iteration: policy still changing after " +
                             std::to_string(max_iters) + " iterations",
                         0.0, max_iters);
}

OccupancyMeasure occupancy(const TabularMdp& mdp, const Policy& pi) {
  const Matrix p = policy_transition(mdp, pi);
  const Index n = mdp.n_states();
  const double gamma = mdp.discount();
  const Matrix system = Matrix::Identity(n, n) - gamma * p.transpose();
  Vector state = system.partialPivLu().solve((1.0 - gamma) * mdp.initial_dist());
  Matrix joint = pi.probs();
  for (Index s = 0; s < n; ++s) joint.row(s) *= state(s);
  return OccupancyMeasure{std::move(state), std::move(joint)};
}

double discounted_state_functional(const TabularMdp& mdp, const Policy& pi, const Vector& g,
                                   double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw DomainError("discounted_state_functional: eta must lie in [0, 1), got " +
                      std::to_string(eta));
  }
  require_state_vector(mdp, g, "discounted_state_functional");
  const Matrix p = policy_transition(mdp, pi);
  const Index n = mdp.n_states();
  const Matrix system = Matrix::Identity(n, n) - eta * p;
  const Vector resolvent_g = system.partialPivLu().solve(g);
  return mdp.initial_dist().dot(p * resolvent_g);
}

double undiscounted_return(const TabularMdp& mdp, const Policy& pi, long horizon) {
  if (horizon < 0) throw DomainError("undiscounted_return: negative horizon");
  const Matrix p_t = policy_transition(mdp, pi).transpose();
  const Vector r = policy_reward(mdp, pi);
  Vector dist = mdp.initial_dist();
  double total = 0.0;
  for (long t = 0; t < horizon; ++t) {
    total += dist.dot(r);
    dist = p_t * dist;
  }
  return total;
}

}  // namespace hurl
