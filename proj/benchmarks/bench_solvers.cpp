#include <benchmark/benchmark.h>

#include "hurl/analysis.hpp"
#include "hurl/envs.hpp"
#include "hurl/learners.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"

namespace {

hurl::TabularMdp make_mdp(benchmark::State& state) {
  hurl::RandomMdpSpec spec;
  spec.n_states = state.range(0);
  spec.n_actions = 5;
  spec.seed = 1;
  return hurl::generate_random_mdp(spec);
}

void BM_EvaluatePolicy(benchmark::State& state) {
  const hurl::TabularMdp mdp = make_mdp(state);
  const hurl::Policy pi = hurl::Policy::uniform(mdp.n_states(), mdp.n_actions());
  for (auto _ : state) benchmark::DoNotOptimize(hurl::evaluate_policy(mdp, pi));
}
BENCHMARK(BM_EvaluatePolicy)->Arg(10)->Arg(20)->Arg(100);

void BM_ValueIteration(benchmark::State& state) {
  const hurl::TabularMdp mdp = make_mdp(state);
  for (auto _ : state) benchmark::DoNotOptimize(hurl::value_iteration(mdp));
}
BENCHMARK(BM_ValueIteration)->Arg(10)->Arg(20)->Arg(100);

void BM_PolicyIteration(benchmark::State& state) {
  const hurl::TabularMdp mdp = make_mdp(state);
  for (auto _ : state) benchmark::DoNotOptimize(hurl::policy_iteration(mdp));
}
BENCHMARK(BM_PolicyIteration)->Arg(10)->Arg(20)->Arg(100);

void BM_Decompose(benchmark::State& state) {
  const hurl::TabularMdp mdp = make_mdp(state);
  hurl::Rng rng(2);
  const hurl::Heuristic h = hurl::random_heuristic(mdp.n_states(), 0.0, 10.0, rng);
  const hurl::Policy pi = hurl::random_policy(mdp.n_states(), mdp.n_actions(), rng);
  for (auto _ : state) benchmark::DoNotOptimize(hurl::decompose(mdp, h, 0.5, pi));
}
BENCHMARK(BM_Decompose)->Arg(10)->Arg(20)->Arg(100);

void BM_ChainTraining(benchmark::State& state) {
  const hurl::TabularMdp chain = hurl::build_chain();
  const hurl::ChainHeuristics hs = hurl::build_good_bad_heuristics(chain);
  hurl::HurlRunConfig cfg;
  cfg.n_iterations = 20;
  cfg.episodes_per_iteration = 20;
  cfg.schedule = hurl::LambdaSchedule::constant(0.5, 20);
  cfg.heuristic = hs.good;
  for (auto _ : state) benchmark::DoNotOptimize(hurl::hurl_train(chain, cfg));
}
BENCHMARK(BM_ChainTraining);

}  // namespace
BENCHMARK_MAIN();
