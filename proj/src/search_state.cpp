#include "sopg/search_state.hpp"

#include <cmath>

#include "sopg/error.hpp"

namespace sopg {

std::weak_ordering compare_states(const SearchState& a, const SearchState& b) {
  if (a.priority > b.priority) return std::weak_ordering::greater;
  if (a.priority < b.priority) return std::weak_ordering::less;
  if (a.band != b.band) return a.band < b.band ? std::weak_ordering::greater : std::weak_ordering::less;
  const auto lex = a.input <=> b.input;
  if (lex < 0) return std::weak_ordering::greater;
  if (lex > 0) return std::weak_ordering::less;
  return std::weak_ordering::equivalent;
}

PackingLadder::PackingLadder(std::vector<double> thresholds) : thresholds_(std::move(thresholds)) {
  for (std::size_t i = 0; i < thresholds_.size(); ++i) {
    const double p = thresholds_[i];
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("packing thresholds must lie in (0, 1)");
    if (i > 0 && !(p < thresholds_[i - 1])) throw ConfigError("packing thresholds must be strictly descending");
    log_thresholds_.push_back(std::log(p));
  }
}

PackingLadder PackingLadder::geometric(double p0, double ratio, int steps) {
  if (steps < 0) throw ConfigError("ladder steps must be >= 0");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("ladder ratio must lie in (0, 1)");
  std::vector<double> t;
  double p = p0;
  for (int k = 0; k <= steps; ++k, p *= ratio) t.push_back(p);
  return PackingLadder(std::move(t));
}

}  // namespace sopg
