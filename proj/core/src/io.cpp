#include "hurl/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "hurl/errors.hpp"

namespace hurl::io {
namespace {

using json = nlohmann::json;

constexpr std::string_view kMdpFormat = "hurl.mdp";
constexpr std::string_view kHeuristicFormat = "hurl.heuristic";
constexpr std::string_view kPolicyFormat = "hurl.policy";
constexpr std::string_view kDatasetFormat = "hurl.dataset";
constexpr std::string_view kValueFormat = "hurl.value";
constexpr std::string_view kQFormat = "hurl.q";

// One top-level key per line, values compact: readable without blowing up
// long numeric arrays to one number per line.
std::string render(const std::vector<std::pair<std::string, json>>& fields) {
  std::string out = "{\n";
  for (std::size_t i = 0; i < fields.size(); ++i) {
    out += "  " + json(fields[i].first).dump() + ": " + fields[i].second.dump();
    out += i + 1 < fields.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

json flatten(const Matrix& m) {
  json arr = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
  }
  return arr;
}

json flatten(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

// Field access with error context. The version is checked first.
class Reader {
 public:
  Reader(std::string_view text, std::string source, std::string_view format)
      : source_(std::move(source)) {
    try {
      root_ = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(source_, line_of(text, e.byte), "", e.what());
    }
    if (!root_.is_object()) throw ParseError(source_, 1, "", "top level must be an object");
    const json& ver = field("version");
    if (!ver.is_number_integer()) fail("version", "must be an integer");
    if (ver.get<int>() != kSchemaVersion) throw VersionError(source_, ver.get<int>(), kSchemaVersion);
    const json& fmt = field("format");
    if (!fmt.is_string() || fmt.get<std::string>() != format) {
      fail("format", "expected \"" + std::string(format) + "\"");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& detail) const {
    throw ParseError(source_, 0, key, detail);
  }

  const json& field(const std::string& key) const {
    const auto it = root_.find(key);
    if (it == root_.end()) fail(key, "missing");
    return *it;
  }

  Index positive_index(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_number_integer() || v.get<long long>() <= 0) fail(key, "must be a positive integer");
    return static_cast<Index>(v.get<long long>());
  }

  double number(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_number()) fail(key, "must be a number");
    return v.get<double>();
  }

  std::string string(const std::string& key) const {
    const json& v = field(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) const {
    const json& v = field(key);
    if (!v.is_array()) fail(key, "must be an array");
    if (v.size() != expected) {
      fail(key, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
    }
    std::vector<double> out;
    out.reserve(expected);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key, "entry " + std::to_string(i) + " is not a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Matrix matrix(const std::string& key, Index rows, Index cols) const {
    const std::vector<double> flat = numbers(key, static_cast<std::size_t>(rows * cols));
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    }
    return m;
  }

  Vector vector(const std::string& key, Index n) const {
    const std::vector<double> flat = numbers(key, static_cast<std::size_t>(n));
    return Eigen::Map<const Vector>(flat.data(), n);
  }

  const json& root() const { return root_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  json root_;
};

// Model invariants failing on load are input errors too.
template <typename F>
auto build(const std::string& source, F&& make) {
  try {
    return make();
  } catch (const InvalidModelError& e) {
    throw ParseError(source, 0, "", e.what());
  } catch (const DimensionError& e) {
    throw ParseError(source, 0, "", e.what());
  }
}

std::vector<std::pair<std::string, json>> header(std::string_view format) {
  return {{"format", std::string(format)}, {"version", kSchemaVersion}};
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "", "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string mdp_to_json(const TabularMdp& mdp) {
  auto fields = header(kMdpFormat);
  fields.emplace_back("n_states", mdp.n_states());
  fields.emplace_back("n_actions", mdp.n_actions());
  fields.emplace_back("discount", mdp.discount());
  fields.emplace_back("reward_range", json::array({mdp.reward_range().lo, mdp.reward_range().hi}));
  fields.emplace_back("initial_dist", flatten(mdp.initial_dist()));
  fields.emplace_back("reward", flatten(mdp.reward()));
  fields.emplace_back("transition", flatten(mdp.transition()));
  return render(fields);
}

TabularMdp mdp_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kMdpFormat);
  const Index n = r.positive_index("n_states");
  const Index m = r.positive_index("n_actions");
  const double discount = r.number("discount");
  const std::vector<double> range = r.numbers("reward_range", 2);
  Vector d0 = r.vector("initial_dist", n);
  Matrix reward = r.matrix("reward", n, m);
  Matrix transition = r.matrix("transition", n * m, n);
  return build(source, [&] {
    return TabularMdp(n, m, std::move(transition), std::move(reward), discount, std::move(d0),
                      RewardRange{range[0], range[1]});
  });
}

void save_mdp(const std::filesystem::path& path, const TabularMdp& mdp) {
  write_text(path, mdp_to_json(mdp));
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  return mdp_from_json(read_text(path), path.string());
}

std::string heuristic_to_json(const Heuristic& h) {
  auto fields = header(kHeuristicFormat);
  fields.emplace_back("provenance", std::string(to_string(h.provenance)));
  fields.emplace_back("n_states", h.size());
  fields.emplace_back("values", flatten(h.values));
  return render(fields);
}

Heuristic heuristic_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kHeuristicFormat);
  const Index n = r.positive_index("n_states");
  Provenance provenance = Provenance::loaded;
  try {
    provenance = provenance_from_string(r.string("provenance"));
  } catch (const DomainError& e) {
    r.fail("provenance", e.what());
  }
  Heuristic h{r.vector("values", n), provenance};
  build(source, [&] {
    validate(h);
    return 0;
  });
  return h;
}

void save_heuristic(const std::filesystem::path& path, const Heuristic& h) {
  write_text(path, heuristic_to_json(h));
}

Heuristic load_heuristic(const std::filesystem::path& path) {
  return heuristic_from_json(read_text(path), path.string());
}

std::string policy_to_json(const Policy& pi) {
  auto fields = header(kPolicyFormat);
  fields.emplace_back("n_states", pi.n_states());
  fields.emplace_back("n_actions", pi.n_actions());
  fields.emplace_back("probs", flatten(pi.probs()));
  return render(fields);
}

Policy policy_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kPolicyFormat);
  const Index n = r.positive_index("n_states");
  const Index m = r.positive_index("n_actions");
  Matrix probs = r.matrix("probs", n, m);
  return build(source, [&] { return Policy(std::move(probs)); });
}

void save_policy(const std::filesystem::path& path, const Policy& pi) {
  write_text(path, policy_to_json(pi));
}

Policy load_policy(const std::filesystem::path& path) {
  return policy_from_json(read_text(path), path.string());
}

std::string dataset_to_json(const TransitionDataset& data) {
  auto fields = header(kDatasetFormat);
  fields.emplace_back("n_states", data.n_states);
  fields.emplace_back("n_actions", data.n_actions);
  json episodes = json::array();
  for (const Episode& ep : data.episodes) {
    json steps = json::array();
    for (const Transition& t : ep) {
      steps.push_back(json::array({t.state, t.action, t.reward, t.next_state, t.done}));
    }
    episodes.push_back(std::move(steps));
  }
  fields.emplace_back("episodes", std::move(episodes));
  return render(fields);
}

TransitionDataset dataset_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kDatasetFormat);
  TransitionDataset data;
  data.n_states = r.positive_index("n_states");
  data.n_actions = r.positive_index("n_actions");
  const json& episodes = r.field("episodes");
  if (!episodes.is_array()) r.fail("episodes", "must be an array");
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const json& steps = episodes[e];
    const std::string key = "episodes[" + std::to_string(e) + "]";
    if (!steps.is_array()) r.fail(key, "must be an array");
    Episode ep;
    for (std::size_t t = 0; t < steps.size(); ++t) {
      const json& tup = steps[t];
      const std::string at = key + "[" + std::to_string(t) + "]";
      if (!tup.is_array() || tup.size() != 5 || !tup[0].is_number_integer() ||
          !tup[1].is_number_integer() || !tup[2].is_number() || !tup[3].is_number_integer() ||
          !tup[4].is_boolean()) {
        r.fail(at, "expected [state, action, reward, next_state, done]");
      }
      ep.push_back(Transition{tup[0].get<Index>(), tup[1].get<Index>(), tup[2].get<double>(),
                              tup[3].get<Index>(), tup[4].get<bool>()});
    }
    data.episodes.push_back(std::move(ep));
  }
  build(source, [&] {
    validate(data, RewardRange{-std::numeric_limits<double>::max(),
                               std::numeric_limits<double>::max()});
    return 0;
  });
  return data;
}

void save_dataset(const std::filesystem::path& path, const TransitionDataset& data) {
  write_text(path, dataset_to_json(data));
}

TransitionDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_json(read_text(path), path.string());
}

std::string value_to_json(const ValueFn& v) {
  auto fields = header(kValueFormat);
  fields.emplace_back("n_states", v.size());
  fields.emplace_back("values", flatten(v.values));
  return render(fields);
}

ValueFn value_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kValueFormat);
  return ValueFn{r.vector("values", r.positive_index("n_states"))};
}

void save_value(const std::filesystem::path& path, const ValueFn& v) {
  write_text(path, value_to_json(v));
}

ValueFn load_value(const std::filesystem::path& path) {
  return value_from_json(read_text(path), path.string());
}

std::string q_to_json(const QFn& q) {
  auto fields = header(kQFormat);
  fields.emplace_back("n_states", q.values.rows());
  fields.emplace_back("n_actions", q.values.cols());
  fields.emplace_back("values", flatten(q.values));
  return render(fields);
}

QFn q_from_json(std::string_view text, const std::string& source) {
  const Reader r(text, source, kQFormat);
  const Index n = r.positive_index("n_states");
  const Index m = r.positive_index("n_actions");
  return QFn{r.matrix("values", n, m)};
}

void save_q(const std::filesystem::path& path, const QFn& q) { write_text(path, q_to_json(q)); }

QFn load_q(const std::filesystem::path& path) { return q_from_json(read_text(path), path.string()); }

void write_curve_csv(std::ostream& out, const LearningCurve& curve) {
  out << kCurveHeader << '\n';
  for (const CurvePoint& p : curve) {
    out << p.iteration << ',' << format_number(p.lambda) << ','
        << format_number(p.return_undiscounted) << ',' << format_number(p.return_discounted) << ','
        << p.env_steps << '\n';
  }
}

void write_curve_csv(const std::filesystem::path& path, const LearningCurve& curve) {
  std::ostringstream ss;
  write_curve_csv(ss, curve);
  write_text(path, ss.str());
}

void write_decomposition_csv(std::ostream& out, std::span<const DecompositionReport> reports) {
  out << kDecompositionHeader << '\n';
  for (const DecompositionReport& r : reports) {
    const double cells[] = {r.lambda,
                            r.v_star_d0,
                            r.v_pi_d0,
                            r.regret,
                            r.bias,
                            r.gap_identity_regret,
                            r.bias_upper_bound_C,
                            r.bias_upper_bound_linf,
                            r.epsilon,
                            r.components.reshaped_gap_d0,
                            r.components.reshaped_gap_occupancy,
                            r.components.optimal_gap_d0,
                            r.components.heuristic_gap,
                            r.identity_residual()};
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i > 0) out << ',';
      out << format_number(cells[i]);
    }
    out << '\n';
  }
}

}  // namespace hurl::io
