#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "sopg/baselines.hpp"
#include "sopg/error.hpp"
#include "support.hpp"

using namespace sopg;
using namespace sopg::testing;

TEST_CASE("UCS emits in non-increasing probability and matches the oracle order") {
  for (std::uint64_t seed = 50; seed <= 55; ++seed) {
    const auto f = make_fixture(seed);
    INFO(f.name);
    const auto oracle = brute_force_enumerate(f.model, f.p_min, f.min_len, f.max_len);
    UcsConfig c;
    c.p_min = f.p_min;
    c.min_len = f.min_len;
    c.max_len = f.max_len;
    c.node_budget = 100000000;
    std::vector<CandidateRecord> out;
    const auto stats = ucs_generate(f.model, c, [&](const CandidateRecord& r) {
      out.push_back(r);
      return true;
    });
    CHECK_FALSE(stats.budget_reached);
    REQUIRE(out.size() == oracle.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(out[i].log_prob == doctest::Approx(oracle[i].log_prob).epsilon(1e-12));
      if (i > 0) CHECK(out[i].log_prob <= out[i - 1].log_prob);
    }
  }
}

TEST_CASE("UCS on uniform {a,b} stops at the node budget") {
  const UniformModel m("ab");
  UcsConfig c;
  c.min_len = 0;
  c.max_len = 10;
  c.node_budget = 10;
  std::vector<CandidateRecord> out;
  const auto stats = ucs_generate(m, c, [&](const CandidateRecord& r) {
    out.push_back(r);
    return true;
  });
  CHECK(stats.budget_reached);
  CHECK(stats.peak_frontier >= 10);
  // Emissions so far are the shortest strings first, in exact order.
  for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i].password.size() >= out[i - 1].password.size());
  REQUIRE_FALSE(out.empty());
  CHECK(out[0].password == "");
}

TEST_CASE("pruned UCS with p_min one emits nothing") {
  const UniformModel m("ab");
  UcsConfig c;
  c.p_min = 1.0;
  c.min_len = 0;
  c.max_len = 4;
  std::size_t n = 0;
  const auto stats = ucs_generate(m, c, [&](const CandidateRecord&) { return ++n, true; });
  CHECK(n == 0);
  CHECK(stats.inferences == 1);
  c.p_min = 0.0;
  CHECK_THROWS_AS(ucs_generate(m, c, [](const CandidateRecord&) { return true; }), ConfigError);
}

TEST_CASE("random sampling: cost is length plus one and seeds are reproducible") {
  TableModel abc([](const std::string& s) -> TableModel::Table {
    const std::string target = "abc";
    if (s.size() < target.size()) return {{std::string(1, target[s.size()]), 1.0}};
    return {{"$", 1.0}};
  });
  SampleConfig c;
  c.count = 3;
  std::vector<SampleRecord> out;
  const auto stats = random_sample_generate(abc, c, [&](const SampleRecord& r) {
    out.push_back(r);
    return true;
  });
  REQUIRE(out.size() == 3);
  for (const auto& r : out) {
    CHECK(r.password == "abc");
    CHECK(r.inferences == 4);
  }
  CHECK(stats.inferences == 12);

  const UniformModel u("abcde");
  auto draw = [&](std::uint64_t seed) {
    SampleConfig sc;
    sc.count = 200;
    sc.seed = seed;
    sc.max_len = 12;
    std::vector<std::string> v;
    std::uint64_t cost = 0;
    const auto st = random_sample_generate(u, sc, [&](const SampleRecord& r) {
      v.push_back(r.password);
      cost += r.inferences;
      return true;
    });
    CHECK(st.inferences == cost);
    return v;
  };
  CHECK(draw(5) == draw(5));
  CHECK(draw(5) != draw(6));
}

TEST_CASE("random sampling: forced END yields empty strings; min_len rejects them") {
  TableModel end_only([](const std::string&) { return TableModel::Table{{"$", 1.0}}; });
  SampleConfig c;
  c.count = 5;
  std::vector<std::string> out;
  const auto stats = random_sample_generate(end_only, c, [&](const SampleRecord& r) {
    out.push_back(r.password);
    return true;
  });
  CHECK(out == std::vector<std::string>(5, ""));
  CHECK(stats.inferences == 5);
}

TEST_CASE("random sampling: max_len closes the password") {
  TableModel always_a([](const std::string&) { return TableModel::Table{{"a", 1.0}}; });
  SampleConfig c;
  c.count = 2;
  c.max_len = 4;
  std::vector<SampleRecord> out;
  random_sample_generate(always_a, c, [&](const SampleRecord& r) {
    out.push_back(r);
    return true;
  });
  REQUIRE(out.size() == 2);
  CHECK(out[0].password == "aaaa");
  CHECK(out[0].inferences == 5);
}

TEST_CASE("random sampling: empirical frequencies follow the model") {
  TableModel coin([](const std::string& s) -> TableModel::Table {
    if (s.empty()) return {{"a", 0.7}, {"b", 0.3}};
    return {{"$", 1.0}};
  });
  SampleConfig c;
  c.count = 20000;
  c.seed = 3;
  std::map<std::string, int> freq;
  random_sample_generate(coin, c, [&](const SampleRecord& r) {
    ++freq[r.password];
    return true;
  });
  CHECK(freq["a"] / 20000.0 == doctest::Approx(0.7).epsilon(0.03));
}

TEST_CASE("brute force on analytic models") {
  const UniformModel u("ab");
  const auto all = brute_force_enumerate(u, 0.03, 1, 3);
  REQUIRE(all.size() == 6);
  CHECK(all[0].password == "a");
  CHECK(all[1].password == "b");
  CHECK(all[2].password == "aa");
  CHECK(all[5].password == "bb");
  CHECK(all[0].log_prob == doctest::Approx(2.0 * std::log(1.0 / 3.0)));

  const auto edge = brute_force_enumerate(u, (1.0 / 9.0) * (1.0 - 1e-12), 0, 3);
  CHECK(edge.size() == 3);

  CHECK_THROWS_AS(brute_force_enumerate(UniformModel("abcdefgh"), 1e-12, 0, 20, 10000), StateSpaceTooLargeError);
  CHECK_THROWS_AS(brute_force_enumerate(u, 0.0, 0, 3), ConfigError);
}
