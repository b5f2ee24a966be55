#include "sopg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "sopg/error.hpp"

namespace sopg {

namespace {

void check_lengths(int min_len, int max_len) {
  if (max_len < 1 || max_len > kMaxLenLimit) throw ConfigError("max_len out of range");
  if (min_len < 0 || min_len > max_len) throw ConfigError("min_len must lie in [0, max_len]");
}

struct UcsNode {
  std::vector<TokenId> input;
  double log_prob;
  bool terminal;
};

struct UcsLess {
  bool operator()(const UcsNode& a, const UcsNode& b) const {
    if (a.log_prob != b.log_prob) return a.log_prob < b.log_prob;
    return a.input > b.input;
  }
};

}  // namespace

UcsStats ucs_generate(const ProbabilityModel& model, const UcsConfig& config, const CandidateSink& sink) {
  check_lengths(config.min_len, config.max_len);
  if (config.node_budget < 1) throw ConfigError("node budget must be >= 1");
  if (config.p_min && !(*config.p_min > 0.0 && *config.p_min <= 1.0))
    throw ConfigError("p_min must lie in (0, 1]");
  const double log_p_min = config.p_min ? std::log(*config.p_min) : kNegInf;

  UcsStats stats;
  std::priority_queue<UcsNode, std::vector<UcsNode>, UcsLess> frontier;
  frontier.push({{kStart}, 0.0, false});
  stats.peak_frontier = 1;

  while (!frontier.empty()) {
    UcsNode node = frontier.top();
    frontier.pop();
    const int depth = static_cast<int>(node.input.size()) - 1;
    if (node.terminal) {
      CandidateRecord rec{decode_input(node.input), node.log_prob, stats.emitted++};
      if (!sink(rec)) break;
      continue;
    }
    const auto dist = model.next_log_probs(node.input);
    ++stats.inferences;
    for (int i = 0; i < kVocabSize; ++i) {
      const auto id = static_cast<TokenId>(i);
      const double lc = dist[id];
      if (lc == kNegInf || id == kStart || id == kBlank || id == kUnk) continue;
      const double lp = node.log_prob + lc;
      if (lp < log_p_min) continue;
      if (id == kEnd ? depth < config.min_len : depth >= config.max_len) continue;
      UcsNode child{node.input, lp, id == kEnd};
      child.input.push_back(id);
      frontier.push(std::move(child));
    }
    stats.peak_frontier = std::max(stats.peak_frontier, frontier.size());
    if (frontier.size() >= config.node_budget) {
      stats.budget_reached = true;
      break;
    }
  }
  return stats;
}

SampleStats random_sample_generate(const ProbabilityModel& model, const SampleConfig& config,
                                   const SampleSink& sink) {
  check_lengths(config.min_len, config.max_len);
  if (config.count < 1) throw ConfigError("sample count must be >= 1");
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SampleStats stats;
  std::vector<TokenId> prefix;
  while (stats.generated < config.count) {
    prefix.assign(1, kStart);
    std::uint64_t cost = 0;
    while (true) {
      const auto dist = model.next_log_probs(prefix);
      ++cost;
      if (static_cast<int>(prefix.size()) - 1 >= config.max_len) break;
      const double u = unit(rng);
      double acc = 0.0;
      int pick = -1;
      int last = -1;
      for (int i = 0; i < kVocabSize; ++i) {
        if (i == kStart || i == kBlank || i == kUnk || dist.log_probs[i] == kNegInf) continue;
        last = i;
        acc += std::exp(dist.log_probs[i]);
        if (u < acc) {
          pick = i;
          break;
        }
      }
      // Rounding can leave u just above the accumulated mass.
      if (pick < 0) pick = last;
      if (pick < 0) throw ModelError("model returned an empty distribution");
      if (pick == kEnd) break;
      prefix.push_back(static_cast<TokenId>(pick));
    }
    stats.inferences += cost;
    ++stats.drawn;
    SampleRecord rec{decode_input(prefix), cost};
    if (static_cast<int>(rec.password.size()) < config.min_len) continue;
    ++stats.generated;
    if (!sink(rec)) break;
  }
  return stats;
}

namespace {

class Enumerator {
 public:
  Enumerator(const ProbabilityModel& model, double log_p_min, int min_len, int max_len, std::uint64_t limit)
      : model_(model), log_p_min_(log_p_min), min_len_(min_len), max_len_(max_len), limit_(limit) {}

  void visit(std::vector<TokenId>& prefix, double log_prob) {
    if (++visited_ > limit_) throw StateSpaceTooLargeError("enumeration exceeded the node limit");
    const int depth = static_cast<int>(prefix.size()) - 1;
    const auto dist = model_.next_log_probs(prefix);
    for (int i = 0; i < kPrintableCount; ++i) {
      if (depth >= max_len_) break;
      const double lc = dist.log_probs[i];
      if (lc == kNegInf) continue;
      const double lp = log_prob + lc;
      // Probabilities never exceed one, so no extension of a prefix below
      // the cutoff can climb back above it.
      if (lp < log_p_min_) continue;
      prefix.push_back(static_cast<TokenId>(i));
      visit(prefix, lp);
      prefix.pop_back();
    }
    const double lp_end = log_prob + dist[kEnd];
    if (dist[kEnd] != kNegInf && depth >= min_len_ && lp_end >= log_p_min_)
      found_.push_back({decode_input(prefix), lp_end});
  }

  std::vector<ScoredPassword> take() { return std::move(found_); }

 private:
  const ProbabilityModel& model_;
  double log_p_min_;
  int min_len_;
  int max_len_;
  std::uint64_t limit_;
  std::uint64_t visited_ = 0;
  std::vector<ScoredPassword> found_;
};

}  // namespace

std::vector<ScoredPassword> brute_force_enumerate(const ProbabilityModel& model, double p_min, int min_len,
                                                  int max_len, std::uint64_t node_limit) {
  check_lengths(min_len, max_len);
  if (!(p_min > 0.0 && p_min <= 1.0)) throw ConfigError("p_min must lie in (0, 1]");
  Enumerator e(model, std::log(p_min), min_len, max_len, node_limit);
  std::vector<TokenId> prefix{kStart};
  e.visit(prefix, 0.0);
  auto out = e.take();
  std::sort(out.begin(), out.end(), [](const ScoredPassword& a, const ScoredPassword& b) {
    if (a.log_prob != b.log_prob) return a.log_prob > b.log_prob;
    return a.password < b.password;
  });
  return out;
}

}  // namespace sopg
