#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "sopg/baselines.hpp"
#include "sopg/error.hpp"
#include "sopg/eval.hpp"
#include "support.hpp"

using namespace sopg;
using namespace sopg::testing;

namespace {

std::multiset<std::string> password_multiset(const std::vector<CandidateRecord>& v) {
  std::multiset<std::string> out;
  for (const auto& r : v) out.insert(r.password);
  return out;
}

std::multiset<std::string> password_multiset(const std::vector<ScoredPassword>& v) {
  std::multiset<std::string> out;
  for (const auto& r : v) out.insert(r.password);
  return out;
}

SopgConfig small_config() {
  SopgConfig c;
  c.p_min = 0.03;
  c.min_len = 1;
  c.max_len = 3;
  c.capacity = 1000;
  return c;
}

}  // namespace

TEST_CASE("uniform two-symbol model: exact candidate set") {
  const UniformModel m("ab");
  for (bool packing : {false, true}) {
    auto c = small_config();
    c.ladder = packing ? PackingLadder({0.5, 0.2}) : PackingLadder::none();
    const auto out = run_sopg(m, c);
    CHECK(password_multiset(out) == std::multiset<std::string>{"a", "b", "aa", "ab", "ba", "bb"});
    for (const auto& r : out)
      CHECK(r.log_prob == doctest::Approx(static_cast<double>(r.password.size() + 1) * std::log(1.0 / 3.0)));
  }
}

TEST_CASE("UCS-mode emits in exact probability order") {
  const UniformModel m("ab");
  auto c = small_config();
  c.ladder = PackingLadder::none();
  const auto out = run_sopg(m, c);
  REQUIRE(out.size() == 6);
  for (std::size_t i = 0; i < 2; ++i) CHECK(out[i].password.size() == 1);
  for (std::size_t i = 2; i < 6; ++i) CHECK(out[i].password.size() == 2);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i].seq == i);
}

TEST_CASE("p_min of one admits nothing below certainty") {
  const UniformModel m("ab");
  auto c = small_config();
  c.p_min = 1.0;
  SearchStats stats;
  CHECK(run_sopg(m, c, &stats).empty());
  CHECK(stats.emitted == 0);
  CHECK(stats.inferences == 1);
}

TEST_CASE("degenerate certain model emits its single password") {
  TableModel m([](const std::string& s) {
    return s.size() < 3 ? TableModel::Table{{"x", 1.0}} : TableModel::Table{{"$", 1.0}};
  });
  auto c = small_config();
  c.p_min = 1.0;
  const auto out = run_sopg(m, c);
  REQUIRE(out.size() == 1);
  CHECK(out[0].password == "xxx");
  CHECK(out[0].log_prob == 0.0);
}

TEST_CASE("invalid configurations are rejected") {
  const UniformModel m("ab");
  const auto sink = [](const CandidateRecord&) { return true; };
  auto bad = [&](auto mutate) {
    auto c = small_config();
    mutate(c);
    CHECK_THROWS_AS(sopg_generate(m, c, sink), ConfigError);
  };
  bad([](SopgConfig& c) { c.p_min = 0.0; });
  bad([](SopgConfig& c) { c.p_min = 1.5; });
  bad([](SopgConfig& c) { c.capacity = 0; });
  bad([](SopgConfig& c) { c.subsearches = 0; });
  bad([](SopgConfig& c) { c.fetch_k = 0; });
  bad([](SopgConfig& c) { c.max_len = 0; });
  bad([](SopgConfig& c) { c.max_len = kMaxLenLimit + 1; });
  bad([](SopgConfig& c) { c.min_len = 4; });
}

TEST_CASE("sink can stop the stream") {
  const UniformModel m("abc");
  auto c = small_config();
  c.p_min = 1e-4;
  c.max_len = 6;
  int seen = 0;
  const auto stats = sopg_generate(m, c, [&](const CandidateRecord&) { return ++seen < 5; });
  CHECK(seen == 5);
  CHECK(stats.emitted == 5);
  CHECK(stats.stopped_early);
}

TEST_CASE("model exceptions propagate out of sub-searches") {
  TableModel m([](const std::string& s) -> TableModel::Table {
    if (s == "ab") throw ModelError("boom");
    return {{"a", 0.4}, {"b", 0.4}, {"$", 0.2}};
  });
  auto c = small_config();
  c.p_min = 1e-3;
  c.max_len = 4;
  c.capacity = 1;
  c.subsearches = 4;
  c.fetch_k = 1;
  CHECK_THROWS_AS(run_sopg(m, c), ModelError);
}

TEST_CASE("fixtures: SOPG equals the brute-force oracle for every capacity and ladder") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    const auto oracle = brute_force_enumerate(f.model, f.p_min, f.min_len, f.max_len);
    const std::map<std::string, double> oracle_lp = [&] {
      std::map<std::string, double> m;
      for (const auto& o : oracle) m[o.password] = o.log_prob;
      return m;
    }();
    for (std::size_t cap : {std::size_t{1}, std::size_t{16}, std::size_t{1000000}}) {
      for (int ladder = 0; ladder < 3; ++ladder) {
        auto c = fixture_config(f);
        c.capacity = cap;
        c.ladder = ladder == 0   ? PackingLadder::none()
                   : ladder == 1 ? PackingLadder({0.2})
                                 : PackingLadder::geometric(0.3, 0.3, 3);
        const auto out = run_sopg(f.model, c);
        CHECK(password_multiset(out) == password_multiset(oracle));
        for (const auto& r : out) {
          const auto it = oracle_lp.find(r.password);
          if (it != oracle_lp.end()) CHECK(std::abs(r.log_prob - it->second) <= 1e-9);
          CHECK(std::abs(r.log_prob - sequence_log_prob(f.model, r.password, f.max_len)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("fixtures: UCS-mode has zero inversions") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    const auto oracle = brute_force_enumerate(f.model, f.p_min, f.min_len, f.max_len);
    auto c = fixture_config(f);
    c.ladder = PackingLadder::none();
    c.capacity = 100000000;
    SearchStats stats;
    const auto out = run_sopg(f.model, c, &stats);
    // The frontier holds open prefixes and finished passwords together, so
    // best-first order needs N above the peak, not just above the set size.
    CHECK(stats.peak_frontier < c.capacity);
    CHECK(ordering_quality(out, oracle).discordant_pairs == 0);
  }
}

TEST_CASE("fixtures: sub-search count does not change the emitted set") {
  for (std::uint64_t seed = 20; seed <= 24; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    auto c = fixture_config(f);
    c.capacity = 8;
    c.fetch_k = 3;
    const auto reference = password_multiset(run_sopg(f.model, c));
    CHECK(std::set<std::string>(reference.begin(), reference.end()).size() == reference.size());
    for (int m : {2, 4, 8}) {
      c.subsearches = m;
      CHECK(password_multiset(run_sopg(f.model, c)) == reference);
    }
  }
}

TEST_CASE("fixtures: inference accounting matches a counting wrapper") {
  for (std::uint64_t seed = 30; seed <= 33; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    CountingModel counted(f.model);
    auto c = fixture_config(f);
    c.capacity = 10;
    c.subsearches = 3;
    SearchStats stats;
    run_sopg(counted, c, &stats);
    CHECK(stats.inferences == counted.count());
    CHECK(stats.inferences == stats.ordinary_expansions + stats.packed_expansions);
    CHECK(stats.peak_frontier <= c.capacity + static_cast<std::size_t>(c.max_len) * 95);
  }
}

TEST_CASE("emit-on-expand policy produces the same set") {
  for (std::uint64_t seed = 40; seed <= 43; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    auto c = fixture_config(f);
    c.capacity = 12;
    const auto a = password_multiset(run_sopg(f.model, c));
    c.emit_policy = EmitPolicy::OnExpand;
    CHECK(password_multiset(run_sopg(f.model, c)) == a);
    c.packed_priority = PackedPriority::Parent;
    CHECK(password_multiset(run_sopg(f.model, c)) == a);
  }
}

TEST_CASE("phase-one-only stops once the frontier reaches capacity") {
  const UniformModel m("abcd");
  SopgConfig c;
  c.p_min = 1e-6;
  c.min_len = 0;
  c.max_len = 8;
  c.capacity = 50;
  c.phase1_only = true;
  SearchStats stats;
  const auto out = run_sopg(m, c, &stats);
  CHECK(stats.phase1_final_frontier >= 50);
  CHECK(stats.phase1_emitted == out.size());
  CHECK(stats.emitted == out.size());
}
