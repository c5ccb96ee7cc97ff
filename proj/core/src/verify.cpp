#include "hurl/verify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "hurl/analysis.hpp"
#include "hurl/errors.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"

namespace hurl {
namespace {

enum Prop : std::size_t {
  kBellmanConsistency,
  kValueBounds,
  kOptimalityDominance,
  kOccupancyDuality,
  kPerformanceDifference,
  kDecompositionIdentity,
  kRegretNonnegative,
  kOffsetInvariance,
  kActionGapAgreement,
  kActionGapSign,
  kBiasBoundC,
  kBiasBoundLinf,
  kPreservedValueBounds,
  kPolicyValueImprovable,
  kImprovableDominance,
  kPessimismImpliesImprovable,
  kPbrsIdentity,
  kPbrsPolicyPreservation,
  kOffsetCovariance,
  kBackupDifference,
  kValueDifference,
  kValueChange,
  kOnlineValueDifference,
  kGeneralPdl,
  kPropCount
};

struct PropSpec {
  const char* name;
  double tolerance;
};

constexpr std::array<PropSpec, kPropCount> kProps{{
    {"bellman_consistency", 1e-9},
    {"value_bounds", 1e-9},
    {"optimality_dominance", 1e-8},
    {"occupancy_duality", 1e-9},
    {"performance_difference", 1e-9},
    {"decomposition_identity", 1e-8},
    {"regret_nonnegative", 1e-8},
    {"offset_invariance", 1e-8},
    {"action_gap_agreement", 1e-8},
    {"action_gap_sign", 1e-9},
    {"bias_bound_C", 1e-8},
    {"bias_bound_linf", 1e-8},
    {"preserved_value_bounds", 1e-9},
    {"policy_value_improvable", 1e-9},
    {"improvable_dominance", 1e-7},
    {"pessimism_implies_improvable", 1e-7},
    {"pbrs_identity", 1e-12},
    {"pbrs_policy_preservation", 1e-9},
    {"offset_covariance", 1e-10},
    {"backup_difference", 1e-10},
    {"value_difference", 1e-8},
    {"value_change_bounds", 1e-8},
    {"online_value_difference", 1e-8},
    {"general_pdl", 1e-8},
}};

constexpr std::array<double, 5> kLambdaGrid{0.0, 0.25, 0.5, 0.75, 1.0};

class Tally {
 public:
  Tally() {
    for (std::size_t i = 0; i < kPropCount; ++i) {
      entries_[i].name = kProps[i].name;
      entries_[i].tolerance = kProps[i].tolerance;
    }
  }

  void record(Prop p, double measure) {
    PropertyTally& t = entries_[p];
    ++t.checked;
    if (!(measure <= t.tolerance)) ++t.failed;
    if (std::isnan(measure) || measure > t.worst) t.worst = measure;
  }

  void merge(const Tally& other) {
    for (std::size_t i = 0; i < kPropCount; ++i) {
      PropertyTally& t = entries_[i];
      const PropertyTally& o = other.entries_[i];
      t.checked += o.checked;
      t.failed += o.failed;
      if (std::isnan(o.worst) || o.worst > t.worst) t.worst = o.worst;
    }
  }

  std::vector<PropertyTally> entries() const { return {entries_.begin(), entries_.end()}; }

 private:
  std::array<PropertyTally, kPropCount> entries_;
};

double range_violation(const Vector& v, double lo, double hi) {
  return std::max(lo - v.minCoeff(), v.maxCoeff() - hi);
}

void check_mdp_core(const CorpusInstance& in, const Solution& opt, long n_policies, Rng& rng,
                    Tally& tally) {
  const TabularMdp& mdp = in.mdp;
  const double gamma = mdp.discount();
  const double v_max = 1.0 / (1.0 - gamma);
  const Vector& d0 = mdp.initial_dist();

  const ValueFn v_pi = evaluate_policy(mdp, in.pi);
  const Vector bellman = policy_reward(mdp, in.pi) + gamma * policy_transition(mdp, in.pi) * v_pi.values;
  tally.record(kBellmanConsistency, (bellman - v_pi.values).cwiseAbs().maxCoeff());
  tally.record(kValueBounds, range_violation(v_pi.values, 0.0, v_max));
  tally.record(kValueBounds, range_violation(value_iteration(mdp).value.values, 0.0, v_max));

  double dominance = 0.0;
  for (long k = 0; k < n_policies; ++k) {
    const ValueFn v = evaluate_policy(mdp, random_policy(mdp.n_states(), mdp.n_actions(), rng));
    dominance = std::max(dominance, (v.values - opt.value.values).maxCoeff());
  }
  tally.record(kOptimalityDominance, dominance);

  const OccupancyMeasure occ = occupancy(mdp, in.pi);
  const double dual = occ.state_action_dist.cwiseProduct(mdp.reward()).sum() / (1.0 - gamma);
  tally.record(kOccupancyDuality, std::abs(dual - v_pi.at(d0)));

  const ValueFn arbitrary{random_heuristic(mdp.n_states(), -v_max, v_max, rng).values};
  tally.record(kPerformanceDifference, performance_difference_residual(mdp, in.pi, arbitrary));
}

void check_decomposition(const CorpusInstance& in, Tally& tally) {
  const TabularMdp& mdp = in.mdp;
  const double gamma = mdp.discount();
  const DecompositionReport rep = decompose(mdp, in.h, in.lambda, in.pi);
  tally.record(kDecompositionIdentity, rep.identity_residual());
  tally.record(kRegretNonnegative, -rep.regret);
  tally.record(kActionGapAgreement,
               std::abs(regret_via_action_gap(mdp, in.h, in.lambda, in.pi) - rep.regret));
  tally.record(kActionGapSign, reshaped_action_gap(mdp, in.h, in.lambda).values.maxCoeff());
  tally.record(kBiasBoundC, rep.bias - rep.bias_upper_bound_C);
  tally.record(kBiasBoundLinf, rep.bias - rep.bias_upper_bound_linf);

  const double shifts[] = {1.0, -1.0, 1.0 / (1.0 - gamma), -1.0 / (1.0 - gamma)};
  double worst = 0.0;
  for (double b : shifts) {
    const auto [d_bias, d_regret] = offset_invariance_check(mdp, in.h, in.lambda, in.pi, b);
    worst = std::max({worst, d_bias, d_regret});
  }
  tally.record(kOffsetInvariance, worst);
}

void check_reshaping(const CorpusInstance& in, const Solution& opt, Rng& rng, Tally& tally) {
  const TabularMdp& mdp = in.mdp;
  const double gamma = mdp.discount();
  const double v_max = 1.0 / (1.0 - gamma);

  for (double lambda : kLambdaGrid) {
    const ReshapedMdp m = hurl_reshape(mdp, in.h_in_range, lambda);
    double worst = range_violation(evaluate_policy(m.materialized(), in.pi).values, 0.0, v_max);
    for (int k = 0; k < 9; ++k) {
      const Policy pi = random_policy(mdp.n_states(), mdp.n_actions(), rng);
      worst = std::max(worst, range_violation(evaluate_policy(m.materialized(), pi).values, 0.0, v_max));
    }
    tally.record(kPreservedValueBounds, worst);
  }

  const ReshapedMdp reshaped = hurl_reshape(mdp, in.h, in.lambda);
  const TabularMdp bar = pbrs_lambda_reshape(mdp, in.h, in.lambda);
  const Matrix h_next = mdp.expected_next(in.h.values);
  const Matrix expected = reshaped.reward() + reshaped.guidance_discount() * h_next -
                          in.h.values.replicate(1, mdp.n_actions());
  tally.record(kPbrsIdentity, (bar.reward() - expected).cwiseAbs().maxCoeff());

  // A differing greedy action only counts when the two actions are not tied in Q-bar*.
  const Solution pbrs_opt = policy_iteration(pbrs_reshape(mdp, in.h));
  double mismatch = 0.0;
  for (Index s = 0; s < mdp.n_states(); ++s) {
    const Index a_bar = pbrs_opt.policy.action(s);
    const Index a_star = opt.policy.action(s);
    if (a_bar != a_star) {
      mismatch = std::max(mismatch, std::abs(pbrs_opt.q(s, a_bar) - pbrs_opt.q(s, a_star)));
    }
  }
  tally.record(kPbrsPolicyPreservation, mismatch);

  const double b = 3.7;
  const ReshapedMdp moved = hurl_reshape(mdp, in.h.shifted(b), in.lambda);
  const double shift = (1.0 - in.lambda) * gamma * b;
  double cov = ((moved.reward() - reshaped.reward()).array() - shift).abs().maxCoeff();
  if (moved.guidance_discount() != reshaped.guidance_discount()) cov = HUGE_VAL;
  tally.record(kOffsetCovariance, cov);
}

void check_heuristics(const CorpusInstance& in, Rng& rng, Tally& tally) {
  const TabularMdp& mdp = in.mdp;
  const Policy pi_prime = random_policy(mdp.n_states(), mdp.n_actions(), rng);
  const Heuristic h = policy_value_heuristic(mdp, pi_prime);
  const ImprovabilityReport imp = is_improvable(mdp, h);
  tally.record(kPolicyValueImprovable, imp.violation);

  if (imp.improvable) {
    for (double lambda : kLambdaGrid) {
      const Solution reshaped_opt = policy_iteration(hurl_reshape(mdp, h, lambda).materialized());
      tally.record(kImprovableDominance, (h.values - reshaped_opt.value.values).maxCoeff());
    }
  }

  const QFn q_pi = q_from_v(mdp, evaluate_policy(mdp, pi_prime));
  for (double c : {0.0, 0.1, 1.0}) {
    const QFn q{q_pi.values.array() - c};
    const PessimismCheck check = check_bellman_pessimism(mdp, q, pi_prime);
    if (!check.passed) continue;
    const ImprovabilityReport follow = is_improvable(mdp, check.heuristic);
    const double above = (check.heuristic.values - h.values).maxCoeff();
    tally.record(kPessimismImpliesImprovable, std::max(follow.violation, above));
  }
}

void check_lemmas(const CorpusInstance& in, Rng& rng, Tally& tally) {
  const TabularMdp& mdp = in.mdp;
  const double v_max = 1.0 / (1.0 - mdp.discount());
  const ValueFn v{random_heuristic(mdp.n_states(), -v_max, v_max, rng).values};
  tally.record(kBackupDifference, bellman_backup_difference_residual(mdp, in.h, in.lambda, v));
  tally.record(kValueDifference, value_difference_residual(mdp, in.h, in.lambda, in.pi));
  tally.record(kValueChange, value_change_violation(mdp, in.h, in.lambda, in.pi));
  tally.record(kOnlineValueDifference,
               online_value_difference_residual(mdp, in.h, in.lambda, in.pi, v));
  tally.record(kGeneralPdl, general_pdl_check(mdp, in.h, in.lambda, in.pi, v));
}

void run_instance(const VerifyConfig& cfg, long index, Tally& tally) {
  CorpusInstance in = corpus_instance(cfg, index);
  const Solution opt = policy_iteration(in.mdp);
  check_mdp_core(in, opt, cfg.policies_per_mdp, in.rng, tally);
  check_decomposition(in, tally);
  check_reshaping(in, opt, in.rng, tally);
  check_heuristics(in, in.rng, tally);
  check_lemmas(in, in.rng, tally);
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyTally& t) { return t.failed == 0; });
}

const PropertyTally& VerifyReport::at(const std::string& name) const {
  for (const PropertyTally& t : properties) {
    if (t.name == name) return t;
  }
  throw DomainError("VerifyReport: no property named '" + name + "'");
}

CorpusInstance corpus_instance(const VerifyConfig& cfg, long index) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(index)};
  Rng rng(seq);
  RandomMdpSpec spec;
  spec.n_states = std::uniform_int_distribution<Index>(2, cfg.max_states)(rng);
  spec.n_actions = std::uniform_int_distribution<Index>(2, cfg.max_actions)(rng);
  spec.discount = std::uniform_real_distribution<double>(0.5, 0.95)(rng);
  spec.dirichlet_alpha = 1.0;
  spec.seed = rng();
  TabularMdp mdp = generate_random_mdp(spec);

  const double v_max = 1.0 / (1.0 - spec.discount);
  Policy pi = random_policy(spec.n_states, spec.n_actions, rng);
  Heuristic h = random_heuristic(spec.n_states, -0.5 * v_max, 1.5 * v_max, rng);
  Heuristic h_in_range = random_heuristic(spec.n_states, 0.0, v_max, rng);
  double lambda = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (index % 10 == 0) lambda = 0.0;
  if (index % 10 == 5) lambda = 1.0;
  return CorpusInstance{std::move(mdp), std::move(pi), std::move(h), std::move(h_in_range), lambda,
                        std::move(rng)};
}

VerifyReport verify_corpus(const VerifyConfig& cfg) {
  if (cfg.corpus_size < 1) throw DomainError("verify_corpus: corpus_size must be >= 1");
  if (cfg.max_states < 2 || cfg.max_actions < 2) {
    throw DomainError("verify_corpus: max_states and max_actions must be >= 2");
  }
  if (cfg.policies_per_mdp < 0) throw DomainError("verify_corpus: policies_per_mdp must be >= 0");

  unsigned n_threads = cfg.threads != 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<long>(n_threads, cfg.corpus_size));

  std::vector<Tally> partial(n_threads);
  std::vector<std::exception_ptr> errors(n_threads);
  std::atomic<long> next{0};
  {
    std::vector<std::jthread> workers;
    for (unsigned w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (long i = next++; i < cfg.corpus_size; i = next++) run_instance(cfg, i, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Tally total;
  for (const Tally& t : partial) total.merge(t);
  return VerifyReport{cfg.corpus_size, total.entries()};
}

}  // namespace hurl
