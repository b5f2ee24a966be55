#include "sopg/model.hpp"

#include <cmath>

#include "sopg/error.hpp"

namespace sopg {

double NextSymbolDistribution::exp_sum() const {
  double sum = 0.0;
  for (double lp : log_probs)
    if (lp != kNegInf) sum += std::exp(lp);
  return sum;
}

double max_abs_difference(const NextSymbolDistribution& a, const NextSymbolDistribution& b) {
  double worst = 0.0;
  for (int i = 0; i < kVocabSize; ++i) {
    const double x = a.log_probs[i];
    const double y = b.log_probs[i];
    if (x == y) continue;
    if (std::isinf(x) || std::isinf(y)) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, std::abs(x - y));
  }
  return worst;
}

void validate_prefix(std::span<const TokenId> prefix) {
  if (prefix.empty() || prefix[0] != kStart)
    throw MalformedPrefixError("prefix must begin with START");
  for (std::size_t i = 1; i < prefix.size(); ++i)
    if (!is_printable_id(prefix[i]))
      throw MalformedPrefixError("prefix position " + std::to_string(i) + " holds non-character id " +
                                 std::to_string(prefix[i]));
}

std::vector<NextSymbolDistribution> ProbabilityModel::next_log_probs_batch(
    std::span<const std::vector<TokenId>> prefixes) const {
  std::vector<NextSymbolDistribution> out;
  out.reserve(prefixes.size());
  for (const auto& p : prefixes) out.push_back(next_log_probs(p));
  return out;
}

NextSymbolDistribution CountingModel::next_log_probs(std::span<const TokenId> prefix) const {
  counter_.add();
  return inner_.next_log_probs(prefix);
}

std::vector<NextSymbolDistribution> CountingModel::next_log_probs_batch(
    std::span<const std::vector<TokenId>> prefixes) const {
  counter_.add(prefixes.size());
  return inner_.next_log_probs_batch(prefixes);
}

double sequence_log_prob(const ProbabilityModel& model, std::string_view password, int max_len) {
  if (static_cast<int>(password.size()) > max_len)
    throw ModelError("password longer than max_len " + std::to_string(max_len));
  std::vector<TokenId> prefix{kStart};
  double log_prob = 0.0;
  for (char c : password) {
    if (!is_printable(static_cast<unsigned char>(c)))
      throw ModelError("password contains a non-printable byte");
    log_prob = log_prob + model.next_log_probs(prefix)[encode_char(c)];
    prefix.push_back(encode_char(c));
  }
  return log_prob + model.next_log_probs(prefix)[kEnd];
}

}  // namespace sopg
