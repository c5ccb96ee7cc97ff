#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "hurl/analysis.hpp"
#include "hurl/envs.hpp"
#include "hurl/errors.hpp"
#include "hurl/heuristics.hpp"
#include "hurl/io.hpp"
#include "hurl/learners.hpp"
#include "hurl/reshaping.hpp"
#include "hurl/solvers.hpp"
#include "hurl/stats.hpp"
#include "hurl/svg.hpp"
#include "hurl/verify.hpp"
#include "study.hpp"

#ifndef HURL_VERSION
#define HURL_VERSION "0.0.0"
#endif

namespace hurl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr double kIdentityTol = 1e-8;

// Output directory plus the manifest that accompanies every run.
class Run {
 public:
  Run(std::string command, const std::vector<std::string>& args) {
    manifest_["tool"] = "hurl";
    manifest_["version"] = HURL_VERSION;
    manifest_["schema_version"] = io::kSchemaVersion;
    manifest_["command"] = std::move(command);
    manifest_["argv"] = args;
    manifest_["config"] = ordered_json::object();
    manifest_["outputs"] = ordered_json::array();
    manifest_["checks"] = ordered_json::object();
  }

  void set_out(const std::string& dir) { out_ = dir; }
  const fs::path& out() const { return out_; }

  ordered_json& config() { return manifest_["config"]; }

  void check(const std::string& name, bool passed) {
    manifest_["checks"][name] = passed;
    if (!passed) all_passed_ = false;
  }
  bool all_passed() const { return all_passed_; }

  void emit(const std::string& name, std::string_view text) {
    ensure_dir();
    io::write_text(out_ / name, text);
    manifest_["outputs"].push_back(name);
  }

  void finish(int code, const std::string& error) {
    manifest_["exit_code"] = code;
    if (!error.empty()) manifest_["error"] = error;
    try {
      ensure_dir();
      io::write_text(out_ / "manifest.json", manifest_.dump(2) + "\n");
    } catch (...) {
      // The manifest is best effort once the run itself has failed.
      if (code == kExitOk) throw;
    }
  }

 private:
  void ensure_dir() {
    std::error_code ec;
    fs::create_directories(out_, ec);
    if (ec) throw Error("cannot create output directory " + out_.string() + ": " + ec.message());
  }

  fs::path out_ = "hurl_out";
  ordered_json manifest_;
  bool all_passed_ = true;
};

std::string num(double x) { return io::format_number(x); }

ordered_json json_vector(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Policy resolve_policy(const std::string& spec, const TabularMdp& mdp) {
  if (spec == "uniform") return Policy::uniform(mdp.n_states(), mdp.n_actions());
  if (spec == "optimal") return policy_iteration(mdp).policy;
  if (spec == "myopic") return build_good_bad_heuristics(mdp).myopic;
  Policy pi = io::load_policy(spec);
  if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions()) {
    throw DimensionError(spec + ": policy shape does not match the MDP");
  }
  return pi;
}

Heuristic load_heuristic_for(const std::string& path, const TabularMdp& mdp) {
  Heuristic h = io::load_heuristic(path);
  if (h.size() != mdp.n_states()) {
    throw DimensionError(path + ": heuristic length does not match the MDP state count");
  }
  return h;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string mdp;
  double tol = kDefaultVITol;
  long max_iters = kDefaultVIMaxIters;
  std::string method = "vi";
};

int cmd_solve(const SolveOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"tol", o.tol}, {"max_iters", o.max_iters}, {"method", o.method}};
  if (!(o.tol > 0.0)) throw DomainError("--tol must be positive");
  const TabularMdp mdp = io::load_mdp(o.mdp);
  const Solution sol = o.method == "pi" ? policy_iteration(mdp, o.max_iters)
                                        : value_iteration(mdp, o.tol, o.max_iters);
  const double gamma = mdp.discount();

  run.emit("v_star.json", io::value_to_json(sol.value));
  run.emit("policy.json", io::policy_to_json(sol.policy));
  run.emit("q_star.json", io::q_to_json(sol.q));

  ordered_json report;
  report["method"] = o.method;
  report["iterations"] = sol.iterations;
  report["bellman_residual"] = sol.residual;
  report["error_bound"] = sol.residual / (1.0 - gamma);
  report["v_star_d0"] = sol.value.at(mdp.initial_dist());
  std::vector<Index> actions = sol.policy.actions();
  report["greedy_actions"] = actions;
  run.emit("solve.json", report.dump(2) + "\n");
  run.check("bellman_residual_within_tol", o.method == "pi" || sol.residual <= o.tol);

  out << "V*(d0) = " << num(report["v_star_d0"].get<double>()) << "  iterations = " << sol.iterations
      << "  residual = " << num(sol.residual) << "\n";
  return run.all_passed() ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------- audit

struct AuditOptions {
  std::string mdp;
  std::string heuristic;
  double tol = 1e-9;
  std::string q;
  std::string policy;
};

int cmd_audit(const AuditOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"heuristic", o.heuristic}, {"tol", o.tol}, {"q", o.q},
                  {"policy", o.policy}};
  if (o.q.empty() != o.policy.empty()) throw DomainError("--q and --policy must be given together");
  const TabularMdp mdp = io::load_mdp(o.mdp);
  const Heuristic h = load_heuristic_for(o.heuristic, mdp);
  const Solution opt = policy_iteration(mdp);
  const ImprovabilityReport imp = is_improvable(mdp, h, o.tol);
  const RewardRange& range = mdp.reward_range();

  ordered_json report;
  report["improvable"] = imp.improvable;
  report["worst_state"] = imp.worst_state;
  report["violation"] = imp.violation;
  report["offset_linf_to_v_star"] = offset_linf_error(h.values, opt.value.values);
  report["max_above_v_star"] = (h.values - opt.value.values).maxCoeff();
  report["reward_range"] = {range.lo, range.hi};
  // With r >= 0 the zero heuristic is a guaranteed floor; flag ranges where it is not.
  report["zero_floor_guaranteed"] = range.lo >= 0.0;
  run.check("improvable", imp.improvable);

  if (!o.q.empty()) {
    const QFn q = io::load_q(o.q);
    const Policy pi_prime = resolve_policy(o.policy, mdp);
    if (q.values.rows() != mdp.n_states() || q.values.cols() != mdp.n_actions()) {
      throw DimensionError(o.q + ": Q table shape does not match the MDP");
    }
    const PessimismCheck pess = check_bellman_pessimism(mdp, q, pi_prime, o.tol);
    report["pessimism"] = {{"passed", pess.passed},
                           {"max_violation", pess.max_violation},
                           {"heuristic", json_vector(pess.heuristic.values)}};
    run.check("bellman_pessimism", pess.passed);
  }
  run.emit("audit.json", report.dump(2) + "\n");

  out << "improvable = " << (imp.improvable ? "true" : "false") << "  worst_state = "
      << imp.worst_state << "  violation = " << num(imp.violation) << "\n";
  if (!report["zero_floor_guaranteed"].get<bool>()) {
    out << "note: declared reward range starts below 0; h = 0 is not a guaranteed floor\n";
  }
  return run.all_passed() ? kExitOk : kExitProperty;
}

// ---------------------------------------------------------------- decompose

struct DecomposeOptions {
  std::string mdp;
  std::string heuristic;
  std::vector<double> lambdas{0.5};
  std::string policy = "uniform";
};

int cmd_decompose(const DecomposeOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"heuristic", o.heuristic}, {"lambdas", o.lambdas},
                  {"policy", o.policy}};
  const TabularMdp mdp = io::load_mdp(o.mdp);
  const Heuristic h = load_heuristic_for(o.heuristic, mdp);
  std::optional<Policy> fixed;
  if (o.policy != "reshaped-optimal") fixed = resolve_policy(o.policy, mdp);

  std::vector<DecompositionReport> reports;
  bool identity = true;
  bool sign = true;
  bool bounds = true;
  for (double lambda : o.lambdas) {
    const Policy pi =
        fixed ? *fixed : policy_iteration(hurl_reshape(mdp, h, lambda).materialized()).policy;
    const DecompositionReport rep = decompose(mdp, h, lambda, pi);
    identity = identity && rep.identity_residual() <= kIdentityTol &&
               std::abs(rep.gap_identity_regret - rep.regret) <= kIdentityTol;
    sign = sign && rep.regret >= -kIdentityTol;
    bounds = bounds && rep.bias <= rep.bias_upper_bound_C + kIdentityTol &&
             rep.bias <= rep.bias_upper_bound_linf + kIdentityTol;
    reports.push_back(rep);
  }
  std::ostringstream csv;
  io::write_decomposition_csv(csv, reports);
  run.emit("decomposition.csv", csv.str());
  run.check("identity", identity);
  run.check("regret_nonnegative", sign);
  run.check("bias_bounds", bounds);

  for (const DecompositionReport& r : reports) {
    out << "lambda = " << num(r.lambda) << "  regret = " << num(r.regret) << "  bias = " << num(r.bias)
        << "  residual = " << num(r.identity_residual()) << "\n";
  }
  return run.all_passed() ? kExitOk : kExitProperty;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const VerifyConfig& cfg, Run& run, std::ostream& out) {
  run.config() = {{"corpus_size", cfg.corpus_size}, {"seed", cfg.seed},
                  {"max_states", cfg.max_states}, {"max_actions", cfg.max_actions},
                  {"policies_per_mdp", cfg.policies_per_mdp}};
  const VerifyReport rep = verify_corpus(cfg);
  std::ostringstream csv;
  csv << "property,tolerance,checked,failed,worst\n";
  for (const PropertyTally& t : rep.properties) {
    csv << t.name << ',' << num(t.tolerance) << ',' << t.checked << ',' << t.failed << ','
        << num(t.worst) << '\n';
    run.check(t.name, t.failed == 0);
    out << (t.failed == 0 ? "PASS " : "FAIL ") << t.name << "  checked=" << t.checked
        << " failed=" << t.failed << " worst=" << num(t.worst) << "\n";
  }
  run.emit("verify.csv", csv.str());
  return rep.passed() ? kExitOk : kExitProperty;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  std::string mdp;
  std::string heuristic;
  std::string schedule = "constant";
  double lambda0 = 1.0;
  double alpha = 1.0;
  long iterations = 20;
  long episodes = 20;
  long seeds = 1;
  std::uint64_t seed = 0;
  std::optional<double> step_size;
  double epsilon_start = 0.3;
  double epsilon_end = 0.05;
  long cutoff = 100;
  bool cold_restart = false;
  bool vanilla = false;
  unsigned threads = 0;
};

HurlRunConfig make_run_config(const TrainOptions& o, const TabularMdp& mdp) {
  HurlRunConfig cfg;
  cfg.n_iterations = o.iterations;
  cfg.episodes_per_iteration = o.episodes;
  cfg.schedule = o.schedule == "tanh" ? LambdaSchedule::tanh(o.lambda0, o.alpha, o.iterations)
                                      : LambdaSchedule::constant(o.lambda0, o.iterations);
  cfg.heuristic = o.heuristic.empty() ? zero_heuristic(mdp.n_states())
                                      : load_heuristic_for(o.heuristic, mdp);
  cfg.learner.step_size = o.step_size;
  cfg.learner.epsilon_start = o.epsilon_start;
  cfg.learner.epsilon_end = o.epsilon_end;
  cfg.learner.episode_cutoff = o.cutoff;
  cfg.learner.seed = o.seed;
  cfg.cold_restart = o.cold_restart;
  cfg.validate(mdp);
  return cfg;
}

int cmd_train(const TrainOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp},          {"heuristic", o.heuristic},
                  {"schedule", o.schedule}, {"lambda0", o.lambda0},
                  {"alpha", o.alpha},       {"iterations", o.iterations},
                  {"episodes", o.episodes}, {"seeds", o.seeds},
                  {"seed", o.seed},         {"epsilon_start", o.epsilon_start},
                  {"epsilon_end", o.epsilon_end}, {"cutoff", o.cutoff},
                  {"cold_restart", o.cold_restart}, {"vanilla", o.vanilla}};
  run.config()["step_size"] = o.step_size ? ordered_json(*o.step_size) : ordered_json("1/N(s,a)");
  if (o.seeds < 1) throw DomainError("--seeds must be >= 1");
  const TabularMdp mdp = io::load_mdp(o.mdp);
  const HurlRunConfig cfg = make_run_config(o, mdp);
  const SeedSweep sweep = train_seeds(mdp, cfg, o.seeds, o.seed, o.threads, o.vanilla);

  if (o.seeds == 1) {
    std::ostringstream csv;
    io::write_curve_csv(csv, sweep.curves.front());
    run.emit("curve.csv", csv.str());
  } else {
    std::ostringstream csv;
    csv << "seed," << io::kCurveHeader << '\n';
    for (std::size_t k = 0; k < sweep.curves.size(); ++k) {
      std::ostringstream one;
      io::write_curve_csv(one, sweep.curves[k]);
      std::string body = one.str();
      body.erase(0, body.find('\n') + 1);
      std::istringstream lines(body);
      for (std::string line; std::getline(lines, line);) csv << o.seed + k << ',' << line << '\n';
    }
    run.emit("curves.csv", csv.str());
  }

  std::ostringstream auc;
  auc << "seed,auc\n";
  for (std::size_t k = 0; k < sweep.auc.size(); ++k) auc << o.seed + k << ',' << num(sweep.auc[k]) << '\n';
  run.emit("auc.csv", auc.str());

  svg::Chart chart;
  chart.title = o.vanilla ? "Q-learning" : "HuRL Q-learning";
  chart.x_label = "iteration";
  chart.y_label = "discounted return V(d0)";
  chart.series.push_back(quartile_series(o.vanilla ? "vanilla" : "hurl", sweep.curves));
  run.emit("curve.svg", svg::render_line_chart(chart));

  const stats::Quartiles q = stats::quartiles(sweep.auc);
  out << "AUC median = " << num(q.median) << "  IQR = [" << num(q.q25) << ", " << num(q.q75)
      << "]  final V(d0) median = "
      << num(chart.series.front().y.empty() ? 0.0 : chart.series.front().y.back()) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- chain-study

struct ChainStudyOptions {
  std::vector<double> lambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  long seeds = 30;
  std::uint64_t seed = 0;
  double train_lambda = 0.5;
  long iterations = 20;
  long episodes = 20;
  bool skip_learning = false;
  unsigned threads = 0;
};

int cmd_chain_study(const ChainStudyOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"lambdas", o.lambdas},         {"seeds", o.seeds},
                  {"seed", o.seed},               {"train_lambda", o.train_lambda},
                  {"iterations", o.iterations},   {"episodes", o.episodes},
                  {"skip_learning", o.skip_learning}};
  for (double l : o.lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw DomainError("--lambdas values must lie in [0, 1]");
  }
  if (o.seeds < 1) throw DomainError("--seeds must be >= 1");

  const TabularMdp chain = build_chain();
  const ChainHeuristics hs = build_good_bad_heuristics(chain);
  const double v_star = policy_iteration(chain).value.at(chain.initial_dist());
  const std::vector<ExactRow> rows = chain_exact_sweep(chain, hs, o.lambdas);

  std::ostringstream csv;
  csv << "heuristic,lambda,v_pi_tilde_star_d0\n";
  std::map<std::string, svg::Series> lines;
  bool endpoint = true;
  for (const ExactRow& r : rows) {
    csv << r.heuristic << ',' << num(r.lambda) << ',' << num(r.value) << '\n';
    svg::Series& s = lines[r.heuristic];
    s.label = r.heuristic + " h";
    s.x.push_back(r.lambda);
    s.y.push_back(r.value);
    if (r.lambda == 1.0) endpoint = endpoint && std::abs(r.value - v_star) <= kIdentityTol;
  }
  bool ordering = true;
  const std::size_t n = o.lambdas.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].value < rows[n + i].value) {
      ordering = false;
      out << "good h below bad h at lambda = " << num(o.lambdas[i]) << ": " << num(rows[i].value)
          << " < " << num(rows[n + i].value) << "\n";
    }
  }
  run.emit("chain_exact.csv", csv.str());
  run.check("lambda_one_reaches_v_star", endpoint);
  run.check("good_at_least_bad", ordering);

  svg::Chart exact;
  exact.title = "Chain MDP: value of the reshaped optimal policy";
  exact.x_label = "lambda";
  exact.y_label = "V(d0) in the original MDP";
  for (const char* name : {"good", "bad", "zero"}) exact.series.push_back(lines[name]);
  run.emit("chain_exact.svg", svg::render_line_chart(exact));
  out << "V*(d0) = " << num(v_star) << "\n";

  if (!o.skip_learning) {
    TrainOptions t;
    t.iterations = o.iterations;
    t.episodes = o.episodes;
    t.lambda0 = o.train_lambda;
    HurlRunConfig cfg = make_run_config(t, chain);
    const std::pair<const char*, Heuristic> arms[] = {
        {"good", hs.good}, {"bad", hs.bad}, {"zero", zero_heuristic(chain.n_states())}};

    std::ostringstream curves;
    std::ostringstream auc;
    curves << "heuristic,seed," << io::kCurveHeader << '\n';
    auc << "heuristic,seed,auc\n";
    svg::Chart learning;
    learning.title = "Chain MDP: Q-learning with HuRL";
    learning.x_label = "iteration";
    learning.y_label = "discounted return V(d0)";

    auto record = [&](const std::string& name, const SeedSweep& sweep) {
      for (std::size_t k = 0; k < sweep.curves.size(); ++k) {
        for (const CurvePoint& p : sweep.curves[k]) {
          curves << name << ',' << o.seed + k << ',' << p.iteration << ',' << num(p.lambda) << ','
                 << num(p.return_undiscounted) << ',' << num(p.return_discounted) << ','
                 << p.env_steps << '\n';
        }
        auc << name << ',' << o.seed + k << ',' << num(sweep.auc[k]) << '\n';
      }
      learning.series.push_back(quartile_series(name, sweep.curves));
      const stats::Quartiles q = stats::quartiles(sweep.auc);
      out << name << ": AUC median = " << num(q.median) << "  IQR = [" << num(q.q25) << ", "
          << num(q.q75) << "]\n";
    };
    for (const auto& [name, h] : arms) {
      cfg.heuristic = h;
      record(std::string(name) + " h", train_seeds(chain, cfg, o.seeds, o.seed, o.threads));
    }
    record("vanilla", train_seeds(chain, cfg, o.seeds, o.seed, o.threads, true));
    run.emit("chain_learning.csv", curves.str());
    run.emit("chain_auc.csv", auc.str());
    run.emit("chain_learning.svg", svg::render_line_chart(learning));
  }
  return run.all_passed() ? kExitOk : kExitProperty;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string name;
  // gridworld
  GridworldSpec grid;
  // random
  RandomMdpSpec random;
  // heuristic / policy / dataset
  std::string mdp;
  std::string kind;
  std::string policy;
  std::string dataset;
  std::string heuristic;
  double lambda = 0.5;
  double shift = 0.0;
  long min_count = 1;
  double unvisited = 0.0;
  long episodes = 100;
  long cutoff = 100;
  std::uint64_t seed = 0;
};

int gen_mdp(const std::string& which, const GenOptions& o, Run& run, std::ostream& out) {
  TabularMdp mdp = build_chain();
  if (which == "gridworld") {
    run.config() = {{"width", o.grid.width},         {"height", o.grid.height},
                    {"goal_reward", o.grid.goal_reward}, {"step_reward", o.grid.step_reward},
                    {"gamma", o.grid.discount},      {"slip", o.grid.slip}};
    mdp = build_gridworld(o.grid);
  } else if (which == "random") {
    run.config() = {{"states", o.random.n_states}, {"actions", o.random.n_actions},
                    {"alpha", o.random.dirichlet_alpha}, {"gamma", o.random.discount},
                    {"seed", o.random.seed}};
    mdp = generate_random_mdp(o.random);
  }
  const std::string file = (o.name.empty() ? which : o.name) + ".json";
  run.emit(file, io::mdp_to_json(mdp));
  out << "wrote " << (run.out() / file).string() << "\n";
  return kExitOk;
}

int gen_heuristic(const GenOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"kind", o.kind}, {"policy", o.policy}, {"dataset", o.dataset},
                  {"shift", o.shift}, {"min_count", o.min_count}, {"unvisited", o.unvisited}};
  const TabularMdp mdp = io::load_mdp(o.mdp);
  Heuristic h;
  if (o.kind == "zero") {
    h = zero_heuristic(mdp.n_states());
  } else if (o.kind == "random-policy") {
    h = policy_value_heuristic(mdp, Policy::uniform(mdp.n_states(), mdp.n_actions()));
  } else if (o.kind == "myopic") {
    h = build_good_bad_heuristics(mdp).bad;
  } else if (o.kind == "optimal") {
    h = policy_value_heuristic(mdp, policy_iteration(mdp).policy);
  } else if (o.kind == "policy") {
    h = policy_value_heuristic(mdp, resolve_policy(o.policy, mdp));
  } else if (o.kind == "monte-carlo" || o.kind == "pessimistic") {
    const TransitionDataset data = io::load_dataset(o.dataset);
    validate(data, mdp.reward_range());
    if (data.n_states != mdp.n_states() || data.n_actions != mdp.n_actions()) {
      throw DimensionError(o.dataset + ": dataset shape does not match the MDP");
    }
    h = o.kind == "monte-carlo"
            ? monte_carlo_heuristic(data, mdp.discount(), o.unvisited)
            : pessimistic_heuristic(data, mdp.discount(), o.min_count, mdp.reward_range().lo);
  } else {
    throw DomainError("unknown heuristic kind '" + o.kind + "'");
  }
  if (o.shift != 0.0) h = h.shifted(o.shift);
  const std::string file = (o.name.empty() ? "heuristic" : o.name) + ".json";
  run.emit(file, io::heuristic_to_json(h));
  out << "wrote " << (run.out() / file).string() << "\n";
  return kExitOk;
}

int gen_policy(const GenOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"kind", o.kind}, {"heuristic", o.heuristic},
                  {"lambda", o.lambda}, {"seed", o.seed}};
  const TabularMdp mdp = io::load_mdp(o.mdp);
  std::optional<Policy> pi;
  if (o.kind == "random") {
    Rng rng(o.seed);
    pi = random_policy(mdp.n_states(), mdp.n_actions(), rng);
  } else if (o.kind == "reshaped-optimal") {
    const Heuristic h = load_heuristic_for(o.heuristic, mdp);
    pi = policy_iteration(hurl_reshape(mdp, h, o.lambda).materialized()).policy;
  } else if (o.kind == "uniform" || o.kind == "optimal" || o.kind == "myopic") {
    pi = resolve_policy(o.kind, mdp);
  } else {
    throw DomainError("unknown policy kind '" + o.kind + "'");
  }
  const std::string file = (o.name.empty() ? "policy" : o.name) + ".json";
  run.emit(file, io::policy_to_json(*pi));
  out << "wrote " << (run.out() / file).string() << "\n";
  return kExitOk;
}

int gen_dataset(const GenOptions& o, Run& run, std::ostream& out) {
  run.config() = {{"mdp", o.mdp}, {"policy", o.policy}, {"episodes", o.episodes},
                  {"cutoff", o.cutoff}, {"seed", o.seed}};
  if (o.episodes < 1) throw DomainError("--episodes must be >= 1");
  const TabularMdp mdp = io::load_mdp(o.mdp);
  const Policy pi = resolve_policy(o.policy, mdp);
  const BehaviorRule behavior = follow_policy(pi);
  const QFn unused{Matrix::Zero(mdp.n_states(), mdp.n_actions())};
  Rng rng(o.seed);
  TransitionDataset data{mdp.n_states(), mdp.n_actions(), {}};
  for (long e = 0; e < o.episodes; ++e) {
    data.episodes.push_back(collect_episode(mdp, unused, behavior, o.cutoff, rng));
  }
  const std::string file = (o.name.empty() ? "dataset" : o.name) + ".json";
  run.emit(file, io::dataset_to_json(data));
  out << "wrote " << (run.out() / file).string() << " (" << data.n_transitions()
      << " transitions)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- dispatch

int exit_code_for(const std::exception_ptr& e, std::string& message) {
  try {
    std::rethrow_exception(e);
  } catch (const ConvergenceError& ex) {
    message = ex.what();
    return kExitNumeric;
  } catch (const Error& ex) {
    message = ex.what();
    return kExitInput;
  } catch (const std::exception& ex) {
    message = ex.what();
    return kExitNumeric;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Heuristic-guided reinforcement learning on tabular MDPs", "hurl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HURL_VERSION);

  std::string out_dir = "hurl_out";
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
  };

  SolveOptions solve;
  CLI::App* s_solve = app.add_subcommand("solve", "Solve an MDP for V*, pi*, Q*");
  s_solve->add_option("--mdp", solve.mdp, "MDP file")->required();
  s_solve->add_option("--tol", solve.tol, "Value-iteration tolerance")->capture_default_str();
  s_solve->add_option("--max-iters", solve.max_iters)->capture_default_str();
  s_solve->add_option("--method", solve.method)->check(CLI::IsMember({"vi", "pi"}))->capture_default_str();
  add_out(s_solve);

  AuditOptions audit;
  CLI::App* s_audit = app.add_subcommand("audit", "Check improvability and pessimism of a heuristic");
  s_audit->add_option("--mdp", audit.mdp)->required();
  s_audit->add_option("--heuristic", audit.heuristic)->required();
  s_audit->add_option("--tol", audit.tol)->capture_default_str();
  s_audit->add_option("--q", audit.q, "Q table for the Bellman-pessimism check");
  s_audit->add_option("--policy", audit.policy, "pi' for the pessimism check (file, uniform, optimal)");
  add_out(s_audit);

  DecomposeOptions dec;
  CLI::App* s_dec = app.add_subcommand("decompose", "Exact regret/bias decomposition");
  s_dec->add_option("--mdp", dec.mdp)->required();
  s_dec->add_option("--heuristic", dec.heuristic)->required();
  s_dec->add_option("--lambda", dec.lambdas, "Mixing coefficients")->delimiter(',')->capture_default_str();
  s_dec->add_option("--policy", dec.policy, "File, uniform, optimal or reshaped-optimal")
      ->capture_default_str();
  add_out(s_dec);

  VerifyConfig ver;
  CLI::App* s_ver = app.add_subcommand("verify", "Check every property on a random-MDP corpus");
  s_ver->add_option("--corpus-size", ver.corpus_size)->capture_default_str();
  s_ver->add_option("--seed", ver.seed)->capture_default_str();
  s_ver->add_option("--max-states", ver.max_states)->capture_default_str();
  s_ver->add_option("--max-actions", ver.max_actions)->capture_default_str();
  s_ver->add_option("--policies-per-mdp", ver.policies_per_mdp)->capture_default_str();
  s_ver->add_option("--threads", ver.threads, "0 = hardware concurrency")->capture_default_str();
  add_out(s_ver);

  TrainOptions train;
  CLI::App* s_train = app.add_subcommand("train", "Run HuRL Q-learning and write learning curves");
  s_train->add_option("--mdp", train.mdp)->required();
  s_train->add_option("--heuristic", train.heuristic, "Heuristic file (default: zero)");
  s_train->add_option("--schedule", train.schedule)
      ->check(CLI::IsMember({"constant", "tanh"}))
      ->capture_default_str();
  s_train->add_option("--lambda0", train.lambda0)->capture_default_str();
  s_train->add_option("--alpha", train.alpha)->capture_default_str();
  s_train->add_option("--iterations", train.iterations)->capture_default_str();
  s_train->add_option("--episodes", train.episodes, "Episodes per iteration")->capture_default_str();
  s_train->add_option("--seeds", train.seeds)->capture_default_str();
  s_train->add_option("--seed", train.seed, "First seed")->capture_default_str();
  s_train->add_option("--step-size", train.step_size, "Constant step size (default 1/N(s,a))");
  s_train->add_option("--epsilon-start", train.epsilon_start)->capture_default_str();
  s_train->add_option("--epsilon-end", train.epsilon_end)->capture_default_str();
  s_train->add_option("--cutoff", train.cutoff)->capture_default_str();
  s_train->add_flag("--cold-restart", train.cold_restart, "Reset Q at every iteration");
  s_train->add_flag("--vanilla", train.vanilla, "Plain Q-learning, no reshaping");
  s_train->add_option("--threads", train.threads)->capture_default_str();
  add_out(s_train);

  ChainStudyOptions chain;
  CLI::App* s_chain = app.add_subcommand("chain-study", "Reproduce the 10-state chain study");
  s_chain->add_option("--lambdas", chain.lambdas)->delimiter(',');
  s_chain->add_option("--seeds", chain.seeds)->capture_default_str();
  s_chain->add_option("--seed", chain.seed)->capture_default_str();
  s_chain->add_option("--train-lambda", chain.train_lambda)->capture_default_str();
  s_chain->add_option("--iterations", chain.iterations)->capture_default_str();
  s_chain->add_option("--episodes", chain.episodes)->capture_default_str();
  s_chain->add_flag("--exact-only", chain.skip_learning, "Skip the sampled learning curves");
  s_chain->add_option("--threads", chain.threads)->capture_default_str();
  add_out(s_chain);

  GenOptions gen;
  CLI::App* s_gen = app.add_subcommand("gen", "Generate MDPs, heuristics, policies and datasets");
  s_gen->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> gens;
  for (const char* what : {"chain", "gridworld", "random", "heuristic", "policy", "dataset"}) {
    CLI::App* g = s_gen->add_subcommand(what);
    g->add_option("--name", gen.name, "Output file stem");
    add_out(g);
    gens.emplace_back(what, g);
  }
  CLI::App* g_grid = gens[1].second;
  g_grid->add_option("--width", gen.grid.width)->capture_default_str();
  g_grid->add_option("--height", gen.grid.height)->capture_default_str();
  g_grid->add_option("--goal-reward", gen.grid.goal_reward)->capture_default_str();
  g_grid->add_option("--step-reward", gen.grid.step_reward)->capture_default_str();
  g_grid->add_option("--gamma", gen.grid.discount)->capture_default_str();
  g_grid->add_option("--slip", gen.grid.slip)->capture_default_str();
  CLI::App* g_rand = gens[2].second;
  g_rand->add_option("--states", gen.random.n_states)->capture_default_str();
  g_rand->add_option("--actions", gen.random.n_actions)->capture_default_str();
  g_rand->add_option("--alpha", gen.random.dirichlet_alpha)->capture_default_str();
  g_rand->add_option("--gamma", gen.random.discount)->capture_default_str();
  g_rand->add_option("--seed", gen.random.seed)->capture_default_str();
  CLI::App* g_heur = gens[3].second;
  g_heur->add_option("--mdp", gen.mdp)->required();
  g_heur->add_option("--kind", gen.kind)
      ->required()
      ->check(CLI::IsMember({"zero", "random-policy", "myopic", "optimal", "policy", "monte-carlo",
                             "pessimistic"}));
  g_heur->add_option("--policy", gen.policy, "For kind=policy");
  g_heur->add_option("--dataset", gen.dataset, "For kind=monte-carlo or pessimistic");
  g_heur->add_option("--shift", gen.shift, "Constant added to every entry")->capture_default_str();
  g_heur->add_option("--min-count", gen.min_count)->capture_default_str();
  g_heur->add_option("--unvisited", gen.unvisited)->capture_default_str();
  CLI::App* g_pol = gens[4].second;
  g_pol->add_option("--mdp", gen.mdp)->required();
  g_pol->add_option("--kind", gen.kind)
      ->required()
      ->check(CLI::IsMember({"uniform", "optimal", "myopic", "random", "reshaped-optimal"}));
  g_pol->add_option("--heuristic", gen.heuristic, "For kind=reshaped-optimal");
  g_pol->add_option("--lambda", gen.lambda)->capture_default_str();
  g_pol->add_option("--seed", gen.seed)->capture_default_str();
  CLI::App* g_data = gens[5].second;
  g_data->add_option("--mdp", gen.mdp)->required();
  g_data->add_option("--policy", gen.policy, "File, uniform, optimal or myopic")->required();
  g_data->add_option("--episodes", gen.episodes)->capture_default_str();
  g_data->add_option("--cutoff", gen.cutoff)->capture_default_str();
  g_data->add_option("--seed", gen.seed)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(e.what()) + "\n"
                                                          : app.help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "hurl: " << e.what() << "\n";
    return kExitInput;
  }

  CLI::App* chosen = app.get_subcommands().front();
  std::string command = chosen->get_name();
  if (chosen == s_gen) command += " " + s_gen->get_subcommands().front()->get_name();
  Run run(command, args);
  run.set_out(out_dir);

  int code = kExitOk;
  std::string message;
  try {
    if (chosen == s_solve) code = cmd_solve(solve, run, out);
    else if (chosen == s_audit) code = cmd_audit(audit, run, out);
    else if (chosen == s_dec) code = cmd_decompose(dec, run, out);
    else if (chosen == s_ver) code = cmd_verify(ver, run, out);
    else if (chosen == s_train) code = cmd_train(train, run, out);
    else if (chosen == s_chain) code = cmd_chain_study(chain, run, out);
    else {
      const std::string which = s_gen->get_subcommands().front()->get_name();
      if (which == "heuristic") code = gen_heuristic(gen, run, out);
      else if (which == "policy") code = gen_policy(gen, run, out);
      else if (which == "dataset") code = gen_dataset(gen, run, out);
      else code = gen_mdp(which, gen, run, out);
    }
  } catch (...) {
    code = exit_code_for(std::current_exception(), message);
    err << "hurl " << command << ": " << message << "\n";
  }
  try {
    run.finish(code, message);
  } catch (const std::exception& e) {
    err << "hurl " << command << ": " << e.what() << "\n";
    return kExitInput;
  }
  return code;
}

}  // namespace hurl::cli
