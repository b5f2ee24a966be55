#include "sopg/sopg.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "sopg/error.hpp"

namespace sopg {

namespace {

// Compares in the log domain with the same expression the oracle uses, so
// the p_min boundary is bit-identical across implementations.
struct Cutoff {
  double log_p_min;
  int min_len;
  int max_len;

  bool viable(const SearchState& parent, TokenId id, double log_cond) const {
    if (log_cond == kNegInf) return false;
    if (parent.log_prob + log_cond < log_p_min) return false;
    if (id == kEnd) return parent.deep >= min_len;
    return parent.deep < max_len;
  }
};

void materialize(const SearchState& parent, TokenId id, double log_cond, Expansion& out) {
  SearchState child;
  child.input = parent.input.extended(id);
  child.deep = parent.deep + 1;
  child.log_prob = parent.log_prob + log_cond;
  child.priority = child.log_prob;
  if (id == kEnd)
    out.completed.push_back(child);
  else
    out.children.push_back(child);
}

// Walks the distribution once: materializes symbols in exactly `band`, and
// reports whether any viable symbol lies in a deeper band.
void split_band(const SearchState& parent, const NextSymbolDistribution& dist, const ExpansionRules& rules,
                int band, Expansion& out) {
  const Cutoff cut{std::log(rules.p_min), rules.min_len, rules.max_len};
  bool deeper = false;
  for (int i = 0; i < kVocabSize; ++i) {
    const auto id = static_cast<TokenId>(i);
    if (id == kStart || id == kBlank || id == kUnk) continue;
    const double lc = dist[id];
    if (!cut.viable(parent, id, lc)) continue;
    const int b = rules.ladder.band_of(lc);
    if (b == band)
      materialize(parent, id, lc, out);
    else if (b > band)
      deeper = true;
  }
  if (!deeper) return;
  SearchState packed;
  packed.input = parent.input;
  packed.deep = parent.deep;
  packed.log_prob = parent.log_prob;
  packed.band = band + 1;
  packed.priority = rules.packed_priority == PackedPriority::UpperBound
                        ? parent.log_prob + rules.ladder.log_ceiling(band + 1)
                        : parent.log_prob;
  out.children.push_back(packed);
}

}  // namespace

void expand_ordinary(const SearchState& state, const NextSymbolDistribution& dist, const ExpansionRules& rules,
                     Expansion& out) {
  split_band(state, dist, rules, 0, out);
}

void expand_packed(const SearchState& state, const NextSymbolDistribution& dist, const ExpansionRules& rules,
                   Expansion& out) {
  if (state.band < 1 || state.band > rules.ladder.last_band())
    throw ConfigError("packed node band outside the ladder");
  split_band(state, dist, rules, state.band, out);
}

Expansion expand(const SearchState& state, const ProbabilityModel& model, const ExpansionRules& rules) {
  if (state.terminal()) throw ConfigError("terminal nodes have no children");
  Expansion out;
  const auto dist = model.next_log_probs(state.input.ids());
  if (state.packed())
    expand_packed(state, dist, rules, out);
  else
    expand_ordinary(state, dist, rules, out);
  return out;
}

CandidateRecord candidate_of(const SearchState& terminal) {
  return {terminal.input.password(), terminal.log_prob, 0};
}

void SopgConfig::validate() const {
  if (!(p_min > 0.0 && p_min <= 1.0)) throw ConfigError("p_min must lie in (0, 1]");
  if (capacity < 1) throw ConfigError("capacity N must be >= 1");
  if (subsearches < 1) throw ConfigError("subsearches m must be >= 1");
  if (fetch_k < 1) throw ConfigError("fetch k must be >= 1");
  if (max_len < 1 || max_len > kMaxLenLimit)
    throw ConfigError("max_len must lie in [1, " + std::to_string(kMaxLenLimit) + "]");
  if (min_len < 0 || min_len > max_len) throw ConfigError("min_len must lie in [0, max_len]");
}

ExpansionRules SopgConfig::rules() const {
  return {p_min, ladder, min_len, max_len, packed_priority};
}

namespace {

class Engine {
 public:
  Engine(const ProbabilityModel& model, const SopgConfig& config, const CandidateSink& sink)
      : model_(model), config_(config), rules_(config.rules()), sink_(sink) {}

  SearchStats run() {
    const auto t0 = std::chrono::steady_clock::now();
    PGQueue global(config_.capacity, config_.max_len);
    global.push(SearchState::root());

    Expansion scratch;
    do {
      process(global.pop(), global, scratch);
    } while (!stop_ && !global.empty() && global.size() < config_.capacity);

    stats_.phase1_emitted = emitted_;
    stats_.phase1_final_frontier = global.size();
    note_peak(global.peak_size());

    if (!config_.phase1_only && !stop_) {
      if (config_.subsearches == 1) {
        worker(global);
      } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < config_.subsearches; ++i) pool.emplace_back([&] { worker(global); });
        for (auto& t : pool) t.join();
      }
    }
    if (failure_) std::rethrow_exception(failure_);

    stats_.emitted = emitted_;
    stats_.inferences = ordinary_.load() + packed_.load();
    stats_.ordinary_expansions = ordinary_.load();
    stats_.packed_expansions = packed_.load();
    stats_.peak_frontier = peak_.load();
    stats_.stopped_early = stop_.load() && stopped_by_sink_;
    stats_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return stats_;
  }

 private:
  void worker(PGQueue& global) {
    try {
      PGQueue local(config_.capacity, config_.max_len);
      Expansion scratch;
      while (!stop_) {
        if (local.empty()) {
          std::lock_guard lock(global_mutex_);
          if (global.empty()) break;
          for (std::size_t i = 0; i < config_.fetch_k && !global.empty(); ++i) local.push(global.pop());
        }
        process(local.pop(), local, scratch);
        note_peak(local.peak_size());
      }
    } catch (...) {
      std::lock_guard lock(emit_mutex_);
      if (!failure_) failure_ = std::current_exception();
      stop_ = true;
    }
  }

  void process(const SearchState& state, PGQueue& queue, Expansion& scratch) {
    if (state.terminal()) {
      emit(state);
      return;
    }
    const auto dist = model_.next_log_probs(state.input.ids());
    scratch.clear();
    if (state.packed()) {
      ++packed_;
      expand_packed(state, dist, rules_, scratch);
    } else {
      ++ordinary_;
      expand_ordinary(state, dist, rules_, scratch);
    }
    for (auto& child : scratch.children) queue.push(std::move(child));
    for (auto& done : scratch.completed) {
      if (config_.emit_policy == EmitPolicy::OnPop)
        queue.push(std::move(done));
      else
        emit(done);
    }
  }

  void emit(const SearchState& terminal) {
    std::lock_guard lock(emit_mutex_);
    if (stop_) return;
    CandidateRecord rec = candidate_of(terminal);
    rec.seq = emitted_++;
    if (!sink_(rec)) {
      stopped_by_sink_ = true;
      stop_ = true;
    }
  }

  void note_peak(std::size_t size) {
    std::size_t cur = peak_.load();
    while (size > cur && !peak_.compare_exchange_weak(cur, size)) {
    }
  }

  const ProbabilityModel& model_;
  const SopgConfig& config_;
  const ExpansionRules rules_;
  const CandidateSink& sink_;

  std::mutex global_mutex_;
  std::mutex emit_mutex_;
  std::uint64_t emitted_ = 0;
  bool stopped_by_sink_ = false;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> ordinary_{0};
  std::atomic<std::uint64_t> packed_{0};
  std::atomic<std::size_t> peak_{0};
  std::exception_ptr failure_;
  SearchStats stats_;
};

}  // namespace

SearchStats sopg_generate(const ProbabilityModel& model, const SopgConfig& config, const CandidateSink& sink) {
  config.validate();
  Engine engine(model, config, sink);
  return engine.run();
}

}  // namespace sopg
