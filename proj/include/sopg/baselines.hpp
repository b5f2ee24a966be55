#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sopg/model.hpp"
#include "sopg/sopg.hpp"

namespace sopg {

struct UcsConfig {
  // When set, children whose path probability falls below it never enter the
  // frontier (the pruned variant).
  std::optional<double> p_min;
  // The search stops as soon as the frontier holds this many nodes.
  std::size_t node_budget = 1000000;
  int min_len = 6;
  int max_len = 32;
};

struct UcsStats {
  std::uint64_t emitted = 0;
  std::uint64_t inferences = 0;
  std::size_t peak_frontier = 0;
  bool budget_reached = false;
};

// Textbook uniform-cost search: one priority queue over path log-probability,
// no packing, completed passwords emitted when popped. Emissions are
// non-increasing in log_prob.
UcsStats ucs_generate(const ProbabilityModel& model, const UcsConfig& config, const CandidateSink& sink);

struct SampleConfig {
  std::uint64_t count = 1000;
  std::uint64_t seed = 0;
  int max_len = 32;
  // Samples shorter than this are drawn (and paid for) but not emitted.
  int min_len = 0;
};

struct SampleRecord {
  std::string password;
  std::uint64_t inferences = 0;  // cost of this sample: length + 1
};

struct SampleStats {
  std::uint64_t generated = 0;
  std::uint64_t drawn = 0;
  std::uint64_t inferences = 0;
};

// Return false to stop sampling early.
using SampleSink = std::function<bool(const SampleRecord&)>;

// Ancestral sampling: draw from each conditional until END, or until max_len
// characters are placed, in which case one more inference closes the
// password. Every sample costs exactly length + 1 inferences.
SampleStats random_sample_generate(const ProbabilityModel& model, const SampleConfig& config,
                                   const SampleSink& sink);

struct ScoredPassword {
  std::string password;
  double log_prob = 0.0;

  bool operator==(const ScoredPassword&) const = default;
};

// Exhaustive depth-first enumeration of every string in [min_len, max_len]
// with path probability >= p_min, sorted by (log_prob desc, password asc).
// Throws StateSpaceTooLargeError once more than `node_limit` prefixes have
// been visited.
std::vector<ScoredPassword> brute_force_enumerate(const ProbabilityModel& model, double p_min, int min_len,
                                                  int max_len, std::uint64_t node_limit = 5'000'000);

}  // namespace sopg
