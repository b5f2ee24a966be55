#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sopg/vocab.hpp"

namespace sopg {

// START + up to kMaxLenLimit characters + END.
inline constexpr int kMaxLenLimit = 62;
inline constexpr int kMaxTokens = kMaxLenLimit + 2;

// Inline, fixed-capacity token sequence so that frontier nodes are plain
// values with no heap allocation.
class TokenPrefix {
 public:
  TokenPrefix() = default;

  static TokenPrefix root() {
    TokenPrefix p;
    p.ids_[0] = kStart;
    p.size_ = 1;
    return p;
  }

  TokenPrefix extended(TokenId id) const {
    TokenPrefix p = *this;
    p.ids_[p.size_++] = id;
    return p;
  }

  std::span<const TokenId> ids() const noexcept { return {ids_.data(), size_}; }
  std::size_t size() const noexcept { return size_; }
  TokenId back() const noexcept { return ids_[size_ - 1]; }
  bool ends_with_end() const noexcept { return size_ > 0 && ids_[size_ - 1] == kEnd; }

  // Printable characters after START, stopping before END.
  std::string password() const { return decode_input(ids()); }

  friend bool operator==(const TokenPrefix& a, const TokenPrefix& b) {
    return std::ranges::equal(a.ids(), b.ids());
  }
  friend std::strong_ordering operator<=>(const TokenPrefix& a, const TokenPrefix& b) {
    return std::lexicographical_compare_three_way(a.ids_.begin(), a.ids_.begin() + a.size_, b.ids_.begin(),
                                                  b.ids_.begin() + b.size_);
  }

 private:
  std::array<TokenId, kMaxTokens> ids_{};
  std::uint8_t size_ = 0;
};

// One frontier node.
//
// Ordinary nodes stand for their prefix. Terminal nodes end in END and stand
// for a completed password waiting to be emitted. Packed nodes (band >= 1)
// repeat their parent's input/deep/log_prob and stand for the parent's
// not-yet-materialized children in conditional-probability band `band`.
// `priority` is the ordering key: log_prob for ordinary and terminal nodes;
// for packed nodes either the parent's log_prob or an upper bound on the
// children it still covers.
struct SearchState {
  TokenPrefix input;
  int deep = 0;
  double log_prob = 0.0;
  int band = 0;
  double priority = 0.0;

  static SearchState root() { return {TokenPrefix::root(), 0, 0.0, 0, 0.0}; }

  bool packed() const noexcept { return band > 0; }
  bool terminal() const noexcept { return input.ends_with_end(); }
};

// Greater means "expand first": higher priority, then lower band (ordinary
// before packed, larger threshold before smaller), then the lexicographically
// smaller input.
std::weak_ordering compare_states(const SearchState& a, const SearchState& b);

// Heap comparator: "a ranks below b".
struct StateLess {
  bool operator()(const SearchState& a, const SearchState& b) const noexcept {
    return compare_states(a, b) < 0;
  }
};

// Strictly descending conditional-probability cutoffs P_0 > ... > P_s in
// (0, 1). Band k >= 1 covers [P_k, P_{k-1}); band s+1 covers [0, P_s).
// An empty ladder disables packing: every child is in band 0.
class PackingLadder {
 public:
  PackingLadder() = default;
  explicit PackingLadder(std::vector<double> thresholds);

  static PackingLadder none() { return {}; }
  static PackingLadder geometric(double p0, double ratio, int steps);

  bool enabled() const noexcept { return !thresholds_.empty(); }
  const std::vector<double>& thresholds() const noexcept { return thresholds_; }
  // Highest band index, s + 1.
  int last_band() const noexcept { return static_cast<int>(thresholds_.size()); }

  // Band of a child with conditional log-probability `log_cond`.
  int band_of(double log_cond) const noexcept {
    int band = 0;
    while (band < static_cast<int>(log_thresholds_.size()) && log_cond < log_thresholds_[band]) ++band;
    return band;
  }

  // log P_{band-1}: the ceiling of conditional probabilities in `band`.
  double log_ceiling(int band) const { return log_thresholds_.at(static_cast<std::size_t>(band - 1)); }

 private:
  std::vector<double> thresholds_;
  std::vector<double> log_thresholds_;
};

}  // namespace sopg
