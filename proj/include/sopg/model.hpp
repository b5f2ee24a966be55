#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sopg/vocab.hpp"

namespace sopg {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Natural-log next-symbol probabilities indexed by vocabulary id. START and
// BLANK are never predicted.
struct NextSymbolDistribution {
  std::array<double, kVocabSize> log_probs;

  NextSymbolDistribution() { log_probs.fill(kNegInf); }

  double operator[](TokenId id) const { return log_probs[id]; }
  double& operator[](TokenId id) { return log_probs[id]; }

  double exp_sum() const;
  bool operator==(const NextSymbolDistribution&) const = default;
};

// Largest absolute coordinate difference, treating two -inf entries as equal.
double max_abs_difference(const NextSymbolDistribution& a, const NextSymbolDistribution& b);

// Throws MalformedPrefixError unless the prefix is START followed by zero or
// more printable ids.
void validate_prefix(std::span<const TokenId> prefix);

// Autoregressive next-symbol oracle. Implementations must be deterministic:
// the packed-node search re-infers parents and relies on getting the same
// distribution back.
class ProbabilityModel {
 public:
  virtual ~ProbabilityModel() = default;

  virtual NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const = 0;

  // One distribution per prefix, order preserved. The default loops.
  virtual std::vector<NextSymbolDistribution> next_log_probs_batch(
      std::span<const std::vector<TokenId>> prefixes) const;

  virtual std::string describe() const = 0;
};

// Monotone count of model evaluations; safe to bump from several workers.
class InferenceCounter {
 public:
  void add(std::uint64_t n = 1) noexcept { count_.fetch_add(n, std::memory_order_relaxed); }
  std::uint64_t value() const noexcept { return count_.load(std::memory_order_relaxed); }
  void reset() noexcept { count_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> count_{0};
};

// Forwards to another model and counts one inference per prefix evaluated.
class CountingModel final : public ProbabilityModel {
 public:
  explicit CountingModel(const ProbabilityModel& inner) : inner_(inner) {}

  NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const override;
  std::vector<NextSymbolDistribution> next_log_probs_batch(
      std::span<const std::vector<TokenId>> prefixes) const override;
  std::string describe() const override { return inner_.describe(); }

  std::uint64_t count() const noexcept { return counter_.value(); }
  void reset() noexcept { counter_.reset(); }

 private:
  const ProbabilityModel& inner_;
  mutable InferenceCounter counter_;
};

// Sum of log P(c_i | prefix) over the password plus log P(END | password),
// accumulated left to right exactly as the search accumulates path costs.
double sequence_log_prob(const ProbabilityModel& model, std::string_view password, int max_len);

}  // namespace sopg
