#pragma once

// Experiment drivers shared by the train and chain-study subcommands and by
// the acceptance suite.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hurl/envs.hpp"
#include "hurl/learners.hpp"
#include "hurl/svg.hpp"

namespace hurl::cli {

struct ExactRow {
  std::string heuristic;
  double lambda = 0.0;
  /// Value in the original MDP of the optimal policy of the reshaped MDP.
  double value = 0.0;
};

/// Rows ordered by heuristic (good, bad, zero), then by lambda.
std::vector<ExactRow> chain_exact_sweep(const TabularMdp& chain, const ChainHeuristics& hs,
                                        std::span<const double> lambdas);

/// V^{pi~*}(d0) for one (h, lambda).
double reshaped_optimal_value(const TabularMdp& mdp, const Heuristic& h, double lambda);

struct SeedSweep {
  std::vector<LearningCurve> curves;  // index k is seed base_seed + k
  std::vector<double> auc;
};

/// Runs `n_seeds` independent trainings; seed k uses learner seed base_seed + k.
/// With `vanilla` set the plain Q-learning path is used instead of hurl_train.
SeedSweep train_seeds(const TabularMdp& mdp, const HurlRunConfig& cfg, long n_seeds,
                      std::uint64_t base_seed, unsigned threads, bool vanilla = false);

/// Median line with a 25th-75th percentile band of return_discounted per iteration.
svg::Series quartile_series(const std::string& label, const std::vector<LearningCurve>& curves);

}  // namespace hurl::cli
