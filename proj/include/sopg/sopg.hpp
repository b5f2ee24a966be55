#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sopg/model.hpp"
#include "sopg/pg_queue.hpp"
#include "sopg/search_state.hpp"

namespace sopg {

// An emitted password. `seq` is the 0-based emission ordinal.
struct CandidateRecord {
  std::string password;
  double log_prob = 0.0;
  std::uint64_t seq = 0;
};

// Return false to stop the search early.
using CandidateSink = std::function<bool(const CandidateRecord&)>;

enum class PackedPriority {
  Parent,      // packed node keeps its parent's log_prob as its key
  UpperBound,  // key = parent log_prob + log of the band's ceiling threshold
};

enum class EmitPolicy {
  OnPop,     // completed passwords enter the frontier and are emitted when popped
  OnExpand,  // emitted as soon as the parent is expanded
};

// Child-generation rules shared by every expansion.
struct ExpansionRules {
  double p_min = 1e-7;
  PackingLadder ladder;
  int min_len = 6;
  int max_len = 32;
  PackedPriority packed_priority = PackedPriority::UpperBound;
};

struct Expansion {
  std::vector<SearchState> children;   // ordinary and packed nodes
  std::vector<SearchState> completed;  // terminal nodes (prefix + END)

  void clear() {
    children.clear();
    completed.clear();
  }
};

// Expands an ordinary node (band 0) from its already-computed distribution.
// Children below p_min in path probability are dropped; at deep == max_len
// only END may complete; END below min_len is dropped. Symbols whose
// conditional probability is below P_0 go into one band-1 packed node, which
// is only created when at least one of them would survive those rules.
void expand_ordinary(const SearchState& state, const NextSymbolDistribution& dist, const ExpansionRules& rules,
                     Expansion& out);

// Materializes band `state.band` of a packed node from the re-inferred parent
// distribution and packs whatever lies below into band + 1. The last band
// materializes everything that is left.
void expand_packed(const SearchState& state, const NextSymbolDistribution& dist, const ExpansionRules& rules,
                   Expansion& out);

// One model inference followed by expand_ordinary or expand_packed.
Expansion expand(const SearchState& state, const ProbabilityModel& model, const ExpansionRules& rules);

CandidateRecord candidate_of(const SearchState& terminal);

struct SopgConfig {
  double p_min = 1e-7;
  std::size_t capacity = 100000;  // N
  PackingLadder ladder = PackingLadder::geometric(0.05, 0.1, 4);
  int max_len = 32;
  int min_len = 6;
  int subsearches = 1;         // m
  std::size_t fetch_k = 64;    // k
  PackedPriority packed_priority = PackedPriority::UpperBound;
  EmitPolicy emit_policy = EmitPolicy::OnPop;
  // Stop once phase one has filled the global frontier to N nodes.
  bool phase1_only = false;

  // Throws ConfigError on any out-of-range knob.
  void validate() const;
  ExpansionRules rules() const;
};

struct SearchStats {
  std::uint64_t emitted = 0;
  std::uint64_t inferences = 0;
  std::uint64_t ordinary_expansions = 0;
  std::uint64_t packed_expansions = 0;
  std::uint64_t phase1_emitted = 0;
  std::size_t peak_frontier = 0;
  std::size_t phase1_final_frontier = 0;
  double wall_seconds = 0.0;
  bool stopped_early = false;
};

// Emits every password whose path probability under `model` is at least
// p_min and whose length lies in [min_len, max_len], each exactly once, in
// approximately descending probability. Phase one runs a single best-first
// search on the global frontier until it holds N nodes; phase two drains it
// with `subsearches` workers, each fetching fetch_k nodes at a time into a
// private frontier. The sink is called under a lock, one record at a time.
SearchStats sopg_generate(const ProbabilityModel& model, const SopgConfig& config, const CandidateSink& sink);

}  // namespace sopg
