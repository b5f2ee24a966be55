#include "sopg/protocols.hpp"

#include <algorithm>

#include "sopg/error.hpp"

namespace sopg {

std::string method_name(Method m) {
  switch (m) {
    case Method::Sopg: return "SOPG";
    case Method::RandomSampling: return "RS";
    case Method::Ucs: return "UCS";
    case Method::UcsPruned: return "UCS+Pruning";
  }
  return "?";
}

namespace {

// Walks an ascending target list as cover grows.
class TargetWatch {
 public:
  TargetWatch(Method method, const std::vector<double>& targets, std::vector<CoverRow>& rows)
      : method_(method), targets_(targets), rows_(rows) {}

  // Returns false once every target has been recorded.
  bool observe(const CoverTracker& tracker, std::uint64_t inferences) {
    while (next_ < targets_.size() && tracker.cover_rate() >= targets_[next_]) {
      rows_.push_back({method_, targets_[next_], tracker.generated(), tracker.unique(), inferences});
      ++next_;
    }
    return next_ < targets_.size();
  }

  bool done() const { return next_ == targets_.size(); }
  double pending() const { return targets_[next_]; }

 private:
  Method method_;
  const std::vector<double>& targets_;
  std::vector<CoverRow>& rows_;
  std::size_t next_ = 0;
};

}  // namespace

std::vector<CoverRow> compare_at_cover(const ProbabilityModel& model, std::vector<double> targets,
                                       const PasswordSet& test, const PasswordSet& train,
                                       const CompareConfig& config) {
  if (targets.empty()) throw ConfigError("no cover targets given");
  for (double t : targets)
    if (!(t > 0.0 && t <= 100.0)) throw ConfigError("cover targets must lie in (0, 100]");
  std::sort(targets.begin(), targets.end());

  std::vector<CoverRow> rows;
  for (Method method : config.methods) {
    CoverTracker tracker(test, train);
    TargetWatch watch(method, targets, rows);
    if (method == Method::Sopg) {
      CountingModel counted(model);
      sopg_generate(counted, config.sopg, [&](const CandidateRecord& rec) {
        tracker.add(rec.password);
        return watch.observe(tracker, counted.count());
      });
    } else if (method == Method::RandomSampling) {
      SampleConfig sc;
      sc.count = config.max_samples;
      sc.seed = config.sample_seed;
      sc.max_len = config.sopg.max_len;
      std::uint64_t inferences = 0;
      random_sample_generate(model, sc, [&](const SampleRecord& rec) {
        inferences += rec.inferences;
        tracker.add(rec.password);
        return watch.observe(tracker, inferences);
      });
    } else {
      throw ConfigError("compare_at_cover supports SOPG and random sampling only");
    }
    if (!watch.done())
      throw TargetUnreachableError(method_name(method) + " never reached cover " + std::to_string(watch.pending()) +
                                       "%",
                                   tracker.cover_rate());
  }
  return rows;
}

std::vector<CapacityRow> frontier_capacity_sweep(const ProbabilityModel& model,
                                                 const std::vector<std::size_t>& capacities,
                                                 const CapacityConfig& config) {
  std::vector<CapacityRow> rows;
  for (std::size_t n : capacities) {
    for (Method method : config.methods) {
      std::uint64_t found = 0;
      auto count = [&](const CandidateRecord&) {
        ++found;
        return true;
      };
      if (method == Method::Ucs || method == Method::UcsPruned) {
        UcsConfig uc;
        uc.node_budget = n;
        uc.min_len = config.sopg.min_len;
        uc.max_len = config.sopg.max_len;
        if (method == Method::UcsPruned) uc.p_min = config.prune_p_min;
        ucs_generate(model, uc, count);
      } else if (method == Method::Sopg) {
        SopgConfig sc = config.sopg;
        sc.capacity = n;
        sc.p_min = config.prune_p_min;
        sc.phase1_only = true;
        sopg_generate(model, sc, count);
      } else {
        throw ConfigError("frontier_capacity_sweep supports UCS, UCS+Pruning and SOPG only");
      }
      rows.push_back({n, method, found});
    }
  }
  return rows;
}

std::vector<ThresholdRow> threshold_sweep(const ProbabilityModel& model, const std::vector<double>& p_mins,
                                          const PasswordSet& test, const PasswordSet& train,
                                          const SopgConfig& base) {
  std::vector<ThresholdRow> rows;
  for (double p : p_mins) {
    SopgConfig sc = base;
    sc.p_min = p;
    CoverTracker tracker(test, train);
    const auto stats = sopg_generate(model, sc, [&](const CandidateRecord& rec) {
      tracker.add(rec.password);
      return true;
    });
    rows.push_back({p, tracker.report(), stats});
  }
  return rows;
}

}  // namespace sopg
