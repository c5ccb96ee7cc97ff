#pragma once

// Independent reference computations for the test suite. Nothing here calls
// the library's solvers or any matrix factorization: values come from
// repeated Bellman backups written out as plain loops, exhaustive policy
// enumeration, or truncated sums.

#include <cmath>
#include <cstdint>
#include <vector>

#include "hurl/mdp.hpp"

namespace hurl::oracle {

inline double dot_row(const TabularMdp& mdp, Index s, Index a, const std::vector<double>& v) {
  double acc = 0.0;
  for (Index t = 0; t < mdp.n_states(); ++t) acc += mdp.prob(s, a, t) * v[static_cast<std::size_t>(t)];
  return acc;
}

/// V^pi by fixed-point iteration V <- r^pi + gamma P^pi V.
inline std::vector<double> policy_value(const TabularMdp& mdp, const Policy& pi,
                                        long iters = 10000) {
  const auto n = static_cast<std::size_t>(mdp.n_states());
  std::vector<double> v(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (long k = 0; k < iters; ++k) {
    double delta = 0.0;
    for (Index s = 0; s < mdp.n_states(); ++s) {
      double acc = 0.0;
      for (Index a = 0; a < mdp.n_actions(); ++a) {
        acc += pi(s, a) * (mdp.reward()(s, a) + mdp.discount() * dot_row(mdp, s, a, v));
      }
      delta = std::max(delta, std::abs(acc - v[static_cast<std::size_t>(s)]));
      next[static_cast<std::size_t>(s)] = acc;
    }
    v.swap(next);
    if (delta == 0.0) break;
  }
  return v;
}

/// Same iteration with a max over actions.
inline std::vector<double> optimal_value(const TabularMdp& mdp, long iters = 10000) {
  const auto n = static_cast<std::size_t>(mdp.n_states());
  std::vector<double> v(n, 0.0);
  std::vector<double> next(n, 0.0);
  for (long k = 0; k < iters; ++k) {
    double delta = 0.0;
    for (Index s = 0; s < mdp.n_states(); ++s) {
      double best = -INFINITY;
      for (Index a = 0; a < mdp.n_actions(); ++a) {
        best = std::max(best, mdp.reward()(s, a) + mdp.discount() * dot_row(mdp, s, a, v));
      }
      delta = std::max(delta, std::abs(best - v[static_cast<std::size_t>(s)]));
      next[static_cast<std::size_t>(s)] = best;
    }
    v.swap(next);
    if (delta == 0.0) break;
  }
  return v;
}

struct Enumeration {
  std::vector<double> best_value;      // per state, max over all deterministic policies
  std::vector<Index> best_actions;     // a policy attaining best_value at d0
  double best_d0 = -INFINITY;
};

/// Evaluates every deterministic stationary policy by fixed-point iteration.
inline Enumeration enumerate_policies(const TabularMdp& mdp, long iters = 2000) {
  const Index n = mdp.n_states();
  const Index m = mdp.n_actions();
  Enumeration out;
  out.best_value.assign(static_cast<std::size_t>(n), -INFINITY);
  std::vector<Index> actions(static_cast<std::size_t>(n), 0);
  while (true) {
    const Policy pi = Policy::deterministic(actions, m);
    const std::vector<double> v = policy_value(mdp, pi, iters);
    double d0 = 0.0;
    for (Index s = 0; s < n; ++s) {
      const auto i = static_cast<std::size_t>(s);
      out.best_value[i] = std::max(out.best_value[i], v[i]);
      d0 += mdp.initial_dist()(s) * v[i];
    }
    if (d0 > out.best_d0) {
      out.best_d0 = d0;
      out.best_actions = actions;
    }
    Index pos = 0;
    while (pos < n && ++actions[static_cast<std::size_t>(pos)] == m) {
      actions[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return out;
}

/// State distribution after t steps, d_t = (P^pi^T)^t d0, advanced one step.
inline std::vector<double> step_distribution(const TabularMdp& mdp, const Policy& pi,
                                             const std::vector<double>& dist) {
  std::vector<double> next(dist.size(), 0.0);
  for (Index s = 0; s < mdp.n_states(); ++s) {
    for (Index a = 0; a < mdp.n_actions(); ++a) {
      const double w = dist[static_cast<std::size_t>(s)] * pi(s, a);
      if (w == 0.0) continue;
      for (Index t = 0; t < mdp.n_states(); ++t) next[static_cast<std::size_t>(t)] += w * mdp.prob(s, a, t);
    }
  }
  return next;
}

inline std::vector<double> initial(const TabularMdp& mdp) {
  std::vector<double> d(static_cast<std::size_t>(mdp.n_states()));
  for (Index s = 0; s < mdp.n_states(); ++s) d[static_cast<std::size_t>(s)] = mdp.initial_dist()(s);
  return d;
}

/// sum_{t<=T} (1-gamma) gamma^t d_t
inline std::vector<double> truncated_occupancy(const TabularMdp& mdp, const Policy& pi,
                                               long horizon = 500) {
  std::vector<double> dist = initial(mdp);
  std::vector<double> occ(dist.size(), 0.0);
  double weight = 1.0 - mdp.discount();
  for (long t = 0; t <= horizon; ++t) {
    for (std::size_t i = 0; i < dist.size(); ++i) occ[i] += weight * dist[i];
    dist = step_distribution(mdp, pi, dist);
    weight *= mdp.discount();
  }
  return occ;
}

/// sum_{t=1}^{T} eta^{t-1} E[g(s_t)]
inline double truncated_functional(const TabularMdp& mdp, const Policy& pi,
                                   const std::vector<double>& g, double eta, long horizon = 500) {
  std::vector<double> dist = initial(mdp);
  double total = 0.0;
  double weight = 1.0;
  for (long t = 1; t <= horizon; ++t) {
    dist = step_distribution(mdp, pi, dist);
    double eg = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) eg += dist[i] * g[i];
    total += weight * eg;
    weight *= eta;
  }
  return total;
}

/// Expected reward sum over the first T steps from d0.
inline double truncated_return(const TabularMdp& mdp, const Policy& pi, double discount,
                               long horizon) {
  std::vector<double> dist = initial(mdp);
  double total = 0.0;
  double weight = 1.0;
  for (long t = 0; t < horizon; ++t) {
    for (Index s = 0; s < mdp.n_states(); ++s) {
      for (Index a = 0; a < mdp.n_actions(); ++a) {
        total += weight * dist[static_cast<std::size_t>(s)] * pi(s, a) * mdp.reward()(s, a);
      }
    }
    dist = step_distribution(mdp, pi, dist);
    weight *= discount;
  }
  return total;
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace hurl::oracle
