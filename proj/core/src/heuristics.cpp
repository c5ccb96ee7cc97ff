#include "hurl/heuristics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "hurl/errors.hpp"
#include "hurl/solvers.hpp"

namespace hurl {
namespace {

constexpr std::array<std::pair<Provenance, std::string_view>, 6> kProvenanceNames{{
    {Provenance::zero, "zero"},
    {Provenance::policy_value, "policy_value"},
    {Provenance::monte_carlo, "monte_carlo"},
    {Provenance::pessimistic, "pessimistic"},
    {Provenance::engineered, "engineered"},
    {Provenance::loaded, "loaded"},
}};

void require_heuristic_shape(const TabularMdp& mdp, const Heuristic& h, const char* op) {
  if (h.size() != mdp.n_states()) {
    throw DimensionError(std::string(op) + ": heuristic has " + std::to_string(h.size()) +
                         " entries, MDP has " + std::to_string(mdp.n_states()) + " states");
  }
}

void require_nonempty(const TransitionDataset& data, const char* op) {
  if (data.n_transitions() == 0) throw DomainError(std::string(op) + ": empty dataset");
}

}  // namespace

std::string_view to_string(Provenance p) {
  for (const auto& [value, name] : kProvenanceNames) {
    if (value == p) return name;
  }
  return "engineered";
}

Provenance provenance_from_string(std::string_view name) {
  for (const auto& [value, n] : kProvenanceNames) {
    if (n == name) return value;
  }
  throw DomainError("unknown heuristic provenance '" + std::string(name) + "'");
}

Heuristic Heuristic::shifted(double b) const {
  return Heuristic{values.array() + b, provenance};
}

void validate(const Heuristic& h) {
  if (h.size() == 0) throw InvalidModelError("heuristic: empty");
  if (!h.values.allFinite()) throw InvalidModelError("heuristic: non-finite entry");
}

std::size_t TransitionDataset::n_transitions() const {
  std::size_t n = 0;
  for (const auto& ep : episodes) n += ep.size();
  return n;
}

void validate(const TransitionDataset& data, const RewardRange& range) {
  if (data.n_states <= 0 || data.n_actions <= 0) {
    throw InvalidModelError("dataset: shape must be positive");
  }
  for (std::size_t e = 0; e < data.episodes.size(); ++e) {
    for (std::size_t t = 0; t < data.episodes[e].size(); ++t) {
      const Transition& tr = data.episodes[e][t];
      const std::string at = "dataset episode " + std::to_string(e) + " step " + std::to_string(t);
      if (tr.state < 0 || tr.state >= data.n_states || tr.next_state < 0 ||
          tr.next_state >= data.n_states) {
        throw InvalidModelError(at + ": state index out of range");
      }
      if (tr.action < 0 || tr.action >= data.n_actions) {
        throw InvalidModelError(at + ": action index out of range");
      }
      if (!std::isfinite(tr.reward) || tr.reward < range.lo || tr.reward > range.hi) {
        throw InvalidModelError(at + ": reward outside declared range");
      }
    }
  }
}

Heuristic zero_heuristic(Index n_states) {
  if (n_states <= 0) throw DomainError("zero_heuristic: n_states must be positive");
  return Heuristic{Vector::Zero(n_states), Provenance::zero};
}

Heuristic policy_value_heuristic(const TabularMdp& mdp, const Policy& pi) {
  return Heuristic{evaluate_policy(mdp, pi).values, Provenance::policy_value};
}

Heuristic monte_carlo_heuristic(const TransitionDataset& data, double gamma, double unvisited) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("monte_carlo_heuristic: gamma must lie in [0, 1)");
  }
  require_nonempty(data, "monte_carlo_heuristic");

  Vector sums = Vector::Zero(data.n_states);
  Vector counts = Vector::Zero(data.n_states);
  for (const auto& ep : data.episodes) {
    double to_go = 0.0;
    for (auto it = ep.rbegin(); it != ep.rend(); ++it) {
      to_go = it->reward + gamma * to_go;
      sums(it->state) += to_go;
      counts(it->state) += 1.0;
    }
  }
  Vector values(data.n_states);
  for (Index s = 0; s < data.n_states; ++s) {
    values(s) = counts(s) > 0.0 ? sums(s) / counts(s) : unvisited;
  }
  return Heuristic{std::move(values), Provenance::monte_carlo};
}

Heuristic pessimistic_heuristic(const TransitionDataset& data, double gamma, long min_count,
                                double reward_floor) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw DomainError("pessimistic_heuristic: gamma must lie in [0, 1)");
  }
  if (min_count < 1) throw DomainError("pessimistic_heuristic: min_count must be >= 1");
  const Index n = data.n_states;
  const Index m = data.n_actions;
  const double floor_value = reward_floor / (1.0 - gamma);
  if (data.n_transitions() == 0) {
    return Heuristic{Vector::Constant(n, floor_value), Provenance::pessimistic};
  }

  Matrix counts = Matrix::Zero(n, m);
  Matrix reward_sum = Matrix::Zero(n, m);
  Matrix next_counts = Matrix::Zero(n * m, n);
  for (const auto& ep : data.episodes) {
    for (const Transition& tr : ep) {
      counts(tr.state, tr.action) += 1.0;
      reward_sum(tr.state, tr.action) += tr.reward;
      // A terminal transition contributes no successor value.
      if (!tr.done) next_counts(tr.state * m + tr.action, tr.next_state) += 1.0;
    }
  }

  const auto supported = [&](Index s, Index a) {
    return counts(s, a) >= static_cast<double>(min_count);
  };

  Vector v = Vector::Constant(n, floor_value);
  Matrix q(n, m);
  for (long iter = 0; iter < kDefaultVIMaxIters; ++iter) {
    for (Index s = 0; s < n; ++s) {
      for (Index a = 0; a < m; ++a) {
        if (!supported(s, a)) {
          q(s, a) = floor_value;
          continue;
        }
        const double c = counts(s, a);
        q(s, a) = reward_sum(s, a) / c + gamma * next_counts.row(s * m + a).dot(v) / c;
      }
    }
    Vector next = q.rowwise().maxCoeff();
    const double delta = (next - v).cwiseAbs().maxCoeff();
    v = std::move(next);
    if (delta <= kDefaultVITol * (1.0 - gamma)) {
      return Heuristic{std::move(v), Provenance::pessimistic};
    }
  }
  throw ConvergenceError("pessimistic_heuristic: value iteration did not converge", 0.0,
                         kDefaultVIMaxIters);
}

ImprovabilityReport is_improvable(const TabularMdp& mdp, const Heuristic& h, double tol) {
  require_heuristic_shape(mdp, h, "is_improvable");
  const Vector best = q_from_v(mdp, ValueFn{h.values}).values.rowwise().maxCoeff();
  const Vector gap = h.values - best;
  ImprovabilityReport report;
  report.violation = gap.maxCoeff(&report.worst_state);
  report.improvable = report.violation <= tol;
  return report;
}

PessimismCheck check_bellman_pessimism(const TabularMdp& mdp, const QFn& q,
                                       const Policy& pi_prime, double tol) {
  if (q.values.rows() != mdp.n_states() || q.values.cols() != mdp.n_actions()) {
    throw DimensionError("check_bellman_pessimism: Q must be S x A");
  }
  Heuristic h{v_from_q(q, pi_prime).values, Provenance::pessimistic};
  const Matrix backup = q_from_v(mdp, ValueFn{h.values}).values;
  const double worst = (q.values - backup).maxCoeff();
  return PessimismCheck{worst <= tol, std::move(h), worst};
}

}  // namespace hurl
