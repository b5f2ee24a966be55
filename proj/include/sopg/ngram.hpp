#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sopg/model.hpp"

namespace sopg {

// Which printable symbols the n-gram model assigns mass to. FullPrintable
// spreads smoothing over all 95 printables plus END; CorpusAlphabet only over
// the characters seen in training plus END, which keeps desk-scale fixtures
// small enough for exhaustive enumeration.
enum class AlphabetMode { FullPrintable, CorpusAlphabet };

// Character n-gram model with add-delta smoothing and backoff to the longest
// seen context suffix. Immutable once built.
class NGramModel final : public ProbabilityModel {
 public:
  static constexpr int kMinOrder = 2;
  static constexpr int kMaxOrder = 6;

  struct Entry {
    std::vector<TokenId> context;
    TokenId next;
    std::uint64_t count;
  };

  static NGramModel train(std::span<const std::string> corpus, int order, double smoothing,
                          AlphabetMode mode = AlphabetMode::FullPrintable);

  // Builds from raw counts; `alphabet` lists the printable ids carrying mass.
  static NGramModel from_counts(int order, double smoothing, std::vector<TokenId> alphabet,
                                std::span<const Entry> entries);

  NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const override;
  std::string describe() const override;

  int order() const noexcept { return order_; }
  double smoothing() const noexcept { return smoothing_; }
  const std::vector<TokenId>& alphabet() const noexcept { return alphabet_; }
  // Alphabet plus END.
  int effective_size() const noexcept { return static_cast<int>(alphabet_.size()) + 1; }

  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;
  std::uint64_t context_total(std::span<const TokenId> context) const;
  std::size_t context_count() const noexcept { return contexts_.size(); }

  // All (context, next, count) triples sorted by context length, context ids,
  // then next id.
  std::vector<Entry> entries() const;

  void save(std::ostream& out) const;
  static NGramModel load(std::istream& in);
  void save_file(const std::string& path) const;
  static NGramModel load_file(const std::string& path);

 private:
  struct ContextStats {
    std::uint64_t total = 0;
    std::vector<std::pair<TokenId, std::uint64_t>> counts;  // sorted by id
    double log_unseen = kNegInf;
    std::vector<std::pair<TokenId, double>> log_seen;
  };

  NGramModel(int order, double smoothing, std::vector<TokenId> alphabet);
  void add(std::span<const TokenId> context, TokenId next, std::uint64_t n);
  void finalize();

  static std::uint64_t key(std::span<const TokenId> context);

  int order_;
  double smoothing_;
  std::vector<TokenId> alphabet_;
  std::unordered_map<std::uint64_t, ContextStats> contexts_;
  double log_uniform_ = kNegInf;
};

}  // namespace sopg
