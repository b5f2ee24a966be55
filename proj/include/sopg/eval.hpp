#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "sopg/baselines.hpp"
#include "sopg/sopg.hpp"

namespace sopg {

inline constexpr int kCleanMinLen = 6;
inline constexpr int kCleanMaxLen = 32;

struct CorpusStats {
  std::uint64_t total = 0;  // kept lines
  std::uint64_t removed_charset = 0;
  std::uint64_t removed_length = 0;
  std::uint64_t unique = 0;
  double repetition_rate = 0.0;  // 1 - unique / total
};

struct CleanResult {
  std::vector<std::string> kept;
  CorpusStats stats;
};

// Keeps lines made only of printable ASCII whose length is in [6, 32].
// A line failing both rules counts as a charset removal.
CleanResult clean_corpus(std::span<const std::string> lines);

// Reads newline-delimited lines, stripping a trailing '\r'.
std::vector<std::string> read_lines(std::istream& in);
std::vector<std::string> read_lines_file(const std::string& path);
void write_lines_file(const std::string& path, std::span<const std::string> lines);

struct Split {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Seeded uniform partition of the password multiset: round(ratio * n) lines
// go to train, the rest to test, each side keeping input order.
Split split_corpus(std::span<const std::string> passwords, double ratio, std::uint64_t seed);

using PasswordSet = std::unordered_set<std::string>;

PasswordSet unique_set(std::span<const std::string> passwords);

// Unique test passwords that never occur in train.
PasswordSet test_minus_train(const PasswordSet& test, const PasswordSet& train);

// 100 * |generated ∩ (test \ train)| / |test \ train|.
double cover_rate(const PasswordSet& generated_unique, const PasswordSet& test, const PasswordSet& train);

// 100 * |generated ∩ (test \ train)| / |generated|.
double effect_rate(const PasswordSet& generated_unique, const PasswordSet& test, const PasswordSet& train);

struct EvalReport {
  std::uint64_t generated = 0;
  std::uint64_t new_unique = 0;
  std::uint64_t match_number = 0;  // distinct generated found in test
  std::uint64_t hit_number = 0;    // distinct generated found in test \ train
  double cover_rate = 0.0;
  double effect_rate = 0.0;
};

EvalReport evaluate(std::span<const std::string> generated, const PasswordSet& test, const PasswordSet& train);

// Streaming evaluation over (test \ train): feed candidates one at a time and
// read cover/effect at any point in O(1).
class CoverTracker {
 public:
  CoverTracker(const PasswordSet& test, const PasswordSet& train);

  // Returns true when the candidate is a first-time hit.
  bool add(const std::string& password);

  std::uint64_t generated() const noexcept { return generated_; }
  std::uint64_t unique() const noexcept { return seen_.size(); }
  std::uint64_t hits() const noexcept { return hits_; }
  std::uint64_t matches() const noexcept { return matches_; }
  std::uint64_t target_size() const noexcept { return targets_.size(); }
  double cover_rate() const;
  double effect_rate() const;
  EvalReport report() const;

 private:
  PasswordSet targets_;
  const PasswordSet& test_;
  PasswordSet seen_;
  std::uint64_t generated_ = 0;
  std::uint64_t hits_ = 0;
  std::uint64_t matches_ = 0;
};

struct OrderingQuality {
  double kendall_tau = 1.0;
  double inversion_fraction = 0.0;
  std::uint64_t discordant_pairs = 0;
};

// Kendall tau between emission order and the descending oracle order. A pair
// is discordant when the earlier emission has strictly lower log_prob; equal
// log_probs count as concordant. Throws SetMismatchError unless the emitted
// passwords are exactly the oracle's.
OrderingQuality ordering_quality(std::span<const CandidateRecord> emitted, std::span<const ScoredPassword> oracle);

// Count of pairs i < j with values[i] < values[j], by merge sort.
std::uint64_t count_ascending_pairs(std::span<const double> values);

struct SynthConfig {
  std::uint64_t count = 100000;
  std::uint64_t seed = 1;
  std::size_t base_words = 4000;
  double zipf_exponent = 1.0;
};

// Seeded synthetic password corpus with a skewed structure mix: pronounceable
// base words drawn with Zipf weights, decorated with digit suffixes, years,
// capitalization and leetspeak, plus a tail of random strings. Every line
// already passes clean_corpus.
std::vector<std::string> synthesize_corpus(const SynthConfig& config);

}  // namespace sopg
