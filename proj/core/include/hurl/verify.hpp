#pragma once

// Random-corpus property checker. Each instance draws an MDP, a policy, two
// heuristics and a mixing coefficient, then measures every identity and
// inequality the library claims. Results are tallied per property.

#include <cstdint>
#include <string>
#include <vector>

#include "hurl/envs.hpp"
#include "hurl/heuristics.hpp"
#include "hurl/mdp.hpp"

namespace hurl {

struct PropertyTally {
  std::string name;
  double tolerance = 0.0;
  long checked = 0;
  long failed = 0;
  /// Largest residual or violation seen (a failure exceeds tolerance).
  double worst = 0.0;
};

struct VerifyConfig {
  long corpus_size = 500;
  std::uint64_t seed = 0;
  Index max_states = 20;
  Index max_actions = 5;
  long policies_per_mdp = 100;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

struct VerifyReport {
  long instances = 0;
  std::vector<PropertyTally> properties;

  bool passed() const;
  const PropertyTally& at(const std::string& name) const;
};

/// One corpus member. Everything is a deterministic function of (seed, index).
struct CorpusInstance {
  TabularMdp mdp;
  Policy pi;
  Heuristic h;           // arbitrary sign and scale
  Heuristic h_in_range;  // entries in [0, 1/(1-gamma)]
  double lambda;
  Rng rng;               // stream for any further draws
};

CorpusInstance corpus_instance(const VerifyConfig& cfg, long index);

/// Throws DomainError when corpus_size < 1. Tallies do not depend on the
/// thread count.
VerifyReport verify_corpus(const VerifyConfig& cfg);

}  // namespace hurl
