#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sopg/baselines.hpp"
#include "sopg/eval.hpp"
#include "sopg/sopg.hpp"

namespace sopg {

enum class Method { Sopg, RandomSampling, Ucs, UcsPruned };

std::string method_name(Method m);

struct CoverRow {
  Method method = Method::Sopg;
  double target = 0.0;      // cover-rate percentage
  std::uint64_t generated = 0;
  std::uint64_t unique = 0;
  std::uint64_t inferences = 0;
};

struct CompareConfig {
  SopgConfig sopg;
  std::uint64_t sample_seed = 7;
  // Random sampling gives up after this many samples.
  std::uint64_t max_samples = 200'000'000;
  std::vector<Method> methods{Method::Sopg, Method::RandomSampling};
};

// Runs each method while tracking cover rate over (test \ train) and records
// the generated/unique/inference counts at the first moment each target is
// reached. Targets are processed in ascending order. Throws
// TargetUnreachableError with the best cover seen if a method runs dry.
std::vector<CoverRow> compare_at_cover(const ProbabilityModel& model, std::vector<double> targets,
                                       const PasswordSet& test, const PasswordSet& train,
                                       const CompareConfig& config);

struct CapacityRow {
  std::size_t capacity = 0;
  Method method = Method::Sopg;
  std::uint64_t passwords_found = 0;
};

struct CapacityConfig {
  // Pruning threshold shared by UCS+pruning and SOPG.
  double prune_p_min = 1e-9;
  SopgConfig sopg;  // capacity and phase1_only are overridden per run
  std::vector<Method> methods{Method::Ucs, Method::UcsPruned, Method::Sopg};
};

// For each N and method, searches until the frontier first holds N nodes and
// records how many passwords were emitted by then.
std::vector<CapacityRow> frontier_capacity_sweep(const ProbabilityModel& model,
                                                 const std::vector<std::size_t>& capacities,
                                                 const CapacityConfig& config);

struct ThresholdRow {
  double p_min = 0.0;
  EvalReport report;
  SearchStats stats;
};

// One full SOPG run per p_min, evaluated against (test \ train).
std::vector<ThresholdRow> threshold_sweep(const ProbabilityModel& model, const std::vector<double>& p_mins,
                                          const PasswordSet& test, const PasswordSet& train,
                                          const SopgConfig& base);

}  // namespace sopg
