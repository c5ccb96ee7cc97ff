#include "study.hpp"

#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"
#include "hurl/stats.hpp"
#include "parallel.hpp"

namespace hurl::cli {

double reshaped_optimal_value(const TabularMdp& mdp, const Heuristic& h, double lambda) {
  const Solution reshaped = policy_iteration(hurl_reshape(mdp, h, lambda).materialized());
  return evaluate_policy(mdp, reshaped.policy).at(mdp.initial_dist());
}

std::vector<ExactRow> chain_exact_sweep(const TabularMdp& chain, const ChainHeuristics& hs,
                                        std::span<const double> lambdas) {
  const std::pair<const char*, Heuristic> entries[] = {
      {"good", hs.good}, {"bad", hs.bad}, {"zero", zero_heuristic(chain.n_states())}};
  std::vector<ExactRow> rows;
  for (const auto& [name, h] : entries) {
    for (double lambda : lambdas) {
      rows.push_back(ExactRow{name, lambda, reshaped_optimal_value(chain, h, lambda)});
    }
  }
  return rows;
}

SeedSweep train_seeds(const TabularMdp& mdp, const HurlRunConfig& cfg, long n_seeds,
                      std::uint64_t base_seed, unsigned threads, bool vanilla) {
  auto curves = parallel_map(n_seeds, threads, [&](long k) {
    HurlRunConfig run = cfg;
    run.learner.seed = base_seed + static_cast<std::uint64_t>(k);
    if (vanilla) {
      return vanilla_q_learning(mdp, run.learner, run.n_iterations, run.episodes_per_iteration).curve;
    }
    return hurl_train(mdp, run).curve;
  });
  SeedSweep sweep;
  for (const LearningCurve& c : curves) sweep.auc.push_back(area_under_curve(c));
  sweep.curves = std::move(curves);
  return sweep;
}

svg::Series quartile_series(const std::string& label, const std::vector<LearningCurve>& curves) {
  svg::Series series;
  series.label = label;
  if (curves.empty()) return series;
  const std::size_t n_points = curves.front().size();
  for (std::size_t i = 0; i < n_points; ++i) {
    std::vector<double> column;
    for (const LearningCurve& c : curves) column.push_back(c.at(i).return_discounted);
    const stats::Quartiles q = stats::quartiles(column);
    series.x.push_back(static_cast<double>(curves.front()[i].iteration));
    series.y.push_back(q.median);
    series.band_lo.push_back(q.q25);
    series.band_hi.push_back(q.q75);
  }
  return series;
}

}  // namespace hurl::cli
