#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "sopg/error.hpp"
#include "sopg/ngram.hpp"
#include "support.hpp"

using namespace sopg;
using sopg::testing::UniformModel;

namespace {

std::vector<TokenId> prefix_of(const std::string& s) {
  std::vector<TokenId> p{kStart};
  for (char c : s) p.push_back(encode_char(c));
  return p;
}

TokenId id(char c) { return encode_char(c); }

std::vector<TokenId> random_prefix(std::mt19937_64& rng, const std::string& chars, int max_len) {
  std::string s;
  const int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
  for (int i = 0; i < len; ++i) s.push_back(chars[rng() % chars.size()]);
  return prefix_of(s);
}

}  // namespace

TEST_CASE("n-gram counts match hand-counted transitions") {
  const std::vector<std::string> corpus{"aa"};
  const auto m = NGramModel::train(corpus, 2, 0.0);
  // START->a, a->a, a->END.
  CHECK(m.count(std::vector<TokenId>{kStart}, id('a')) == 1);
  CHECK(m.count(std::vector<TokenId>{id('a')}, id('a')) == 1);
  CHECK(m.count(std::vector<TokenId>{id('a')}, kEnd) == 1);
  CHECK(m.context_total(std::vector<TokenId>{id('a')}) == 2);
  // Unigram context sees every transition.
  CHECK(m.context_total(std::vector<TokenId>{}) == 3);

  const auto d = m.next_log_probs(prefix_of("a"));
  CHECK(d[id('a')] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(d[kEnd] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  CHECK(d[id('b')] == kNegInf);
  CHECK(m.next_log_probs(prefix_of(""))[id('a')] == 0.0);
}

TEST_CASE("n-gram: repeated password gives a deterministic successor") {
  const std::vector<std::string> corpus{"ab", "ab"};
  const auto m = NGramModel::train(corpus, 2, 0.0);
  CHECK(m.next_log_probs(prefix_of("a"))[id('b')] == 0.0);
  CHECK(m.next_log_probs(prefix_of("ab"))[kEnd] == 0.0);
}

TEST_CASE("n-gram: smoothed closed form over 96 effective symbols") {
  const std::vector<std::string> corpus{"aa", "ab", "abc"};
  const double delta = 0.01;
  const auto m = NGramModel::train(corpus, 2, delta);
  CHECK(m.effective_size() == 96);
  // Context 'a': a->a once, a->END once, a->b twice. Total 4.
  const auto d = m.next_log_probs(prefix_of("ba"));
  const double denom = 4.0 + 96.0 * delta;
  CHECK(std::exp(d[id('b')]) == doctest::Approx((2 + delta) / denom).epsilon(1e-12));
  CHECK(std::exp(d[id('a')]) == doctest::Approx((1 + delta) / denom).epsilon(1e-12));
  CHECK(std::exp(d[kEnd]) == doctest::Approx((1 + delta) / denom).epsilon(1e-12));
  CHECK(std::exp(d[id('z')]) == doctest::Approx(delta / denom).epsilon(1e-12));
  CHECK(d[kStart] == kNegInf);
  CHECK(d[kBlank] == kNegInf);
  CHECK(d[kUnk] == kNegInf);
}

TEST_CASE("n-gram backs off to the longest seen context suffix") {
  const std::vector<std::string> corpus{"abc", "xbd"};
  const auto m = NGramModel::train(corpus, 3, 0.0);
  // Context "ab" seen: only c follows.
  CHECK(m.next_log_probs(prefix_of("ab"))[id('c')] == 0.0);
  // Context "zb" unseen: back off to "b", which saw c and d once each.
  const auto d = m.next_log_probs(prefix_of("zb"));
  CHECK(d[id('c')] == doctest::Approx(std::log(0.5)));
  CHECK(d[id('d')] == doctest::Approx(std::log(0.5)));
  // Context "q" unseen entirely: unigram.
  const auto u = m.next_log_probs(prefix_of("q"));
  CHECK(std::exp(u[kEnd]) == doctest::Approx(2.0 / 8.0));
}

TEST_CASE("n-gram training errors") {
  const std::vector<std::string> empty;
  CHECK_THROWS_AS(NGramModel::train(empty, 3, 0.01), EmptyCorpusError);
  const std::vector<std::string> corpus{"abc"};
  CHECK_THROWS_AS(NGramModel::train(corpus, 1, 0.01), ConfigError);
  CHECK_THROWS_AS(NGramModel::train(corpus, 7, 0.01), ConfigError);
  CHECK_THROWS_AS(NGramModel::train(corpus, 3, -0.5), ConfigError);
  const std::vector<std::string> dirty{"ab\x01"};
  CHECK_THROWS_AS(NGramModel::train(dirty, 3, 0.01), ModelError);
}

TEST_CASE("corpus alphabet restricts support") {
  const std::vector<std::string> corpus{"abba", "cab"};
  const auto m = NGramModel::train(corpus, 2, 0.1, AlphabetMode::CorpusAlphabet);
  CHECK(m.effective_size() == 4);
  const auto d = m.next_log_probs(prefix_of("c"));
  CHECK(d[id('z')] == kNegInf);
  CHECK(d.exp_sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("malformed prefixes are rejected") {
  const std::vector<std::string> corpus{"abc"};
  const auto m = NGramModel::train(corpus, 3, 0.01);
  CHECK_THROWS_AS(m.next_log_probs(std::vector<TokenId>{}), MalformedPrefixError);
  CHECK_THROWS_AS(m.next_log_probs(std::vector<TokenId>{id('a')}), MalformedPrefixError);
  CHECK_THROWS_AS(m.next_log_probs(std::vector<TokenId>{kStart, id('a'), kEnd}), MalformedPrefixError);
  CHECK_THROWS_AS(m.next_log_probs(std::vector<TokenId>{kStart, kBlank}), MalformedPrefixError);
}

TEST_CASE("normalization and determinism on random prefixes") {
  const auto corpus = std::vector<std::string>{"password", "dragon12", "monkey", "letmein", "qwerty1", "abc123"};
  std::mt19937_64 rng(5);
  for (int order = 2; order <= 6; ++order) {
    const auto m = NGramModel::train(corpus, order, 0.02);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_prefix(rng, "adgmnopqrstwy123", 10);
      const auto a = m.next_log_probs(p);
      const auto b = m.next_log_probs(p);
      CHECK(std::abs(a.exp_sum() - 1.0) <= 1e-6);
      CHECK(a == b);
      CHECK(a[kStart] == kNegInf);
      CHECK(a[kBlank] == kNegInf);
    }
  }
}

TEST_CASE("sequence_log_prob") {
  SUBCASE("uniform analytic case") {
    const UniformModel u("ab");
    CHECK(sequence_log_prob(u, "a", 32) == doctest::Approx(2.0 * std::log(1.0 / 3.0)));
    CHECK(sequence_log_prob(u, "abba", 32) == doctest::Approx(5.0 * std::log(1.0 / 3.0)));
  }
  SUBCASE("hand-counted bigram") {
    const std::vector<std::string> corpus{"aa"};
    const auto m = NGramModel::train(corpus, 2, 0.0);
    CHECK(sequence_log_prob(m, "aa", 32) == doctest::Approx(2.0 * std::log(0.5)));
    CHECK(sequence_log_prob(m, "ab", 32) == kNegInf);
  }
  SUBCASE("errors") {
    const UniformModel u("ab");
    CHECK_THROWS_AS(sequence_log_prob(u, "aaaa", 3), ModelError);
    CHECK_THROWS_AS(sequence_log_prob(u, "a\x02", 8), ModelError);
  }
}

TEST_CASE("counting model counts one inference per evaluated prefix") {
  const UniformModel u("ab");
  CountingModel c(u);
  c.next_log_probs(prefix_of("a"));
  const std::vector<std::vector<TokenId>> batch{prefix_of(""), prefix_of("b"), prefix_of("ab")};
  const auto out = c.next_log_probs_batch(batch);
  CHECK(out.size() == 3);
  CHECK(c.count() == 4);
}

TEST_CASE("model file round-trip is bit-identical") {
  const auto corpus = std::vector<std::string>{"sunshine", "iloveyou", "princess", "rockyou", "12345678", "s3cr3t!"};
  for (auto mode : {AlphabetMode::FullPrintable, AlphabetMode::CorpusAlphabet}) {
    const auto m = NGramModel::train(corpus, 4, 0.013, mode);
    std::stringstream buf;
    m.save(buf);
    const auto loaded = NGramModel::load(buf);
    CHECK(loaded.order() == 4);
    CHECK(loaded.smoothing() == 0.013);
    CHECK(loaded.alphabet() == m.alphabet());
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
      const auto p = random_prefix(rng, "sunhielovyprc12345678!3t", 9);
      CHECK(loaded.next_log_probs(p) == m.next_log_probs(p));
    }
    // Sorted body: saving the loaded model reproduces the same bytes.
    std::stringstream again;
    loaded.save(again);
    std::stringstream first;
    m.save(first);
    CHECK(again.str() == first.str());
  }
}

TEST_CASE("model file errors") {
  const std::vector<std::string> corpus{"abcdef", "abcxyz"};
  const auto m = NGramModel::train(corpus, 3, 0.01);
  std::stringstream buf;
  m.save(buf);
  const std::string text = buf.str();

  SUBCASE("truncated") {
    std::stringstream cut(text.substr(0, text.size() / 2));
    CHECK_THROWS_AS(NGramModel::load(cut), CorruptFileError);
    std::stringstream no_end(text.substr(0, text.size() - 4));
    CHECK_THROWS_AS(NGramModel::load(no_end), CorruptFileError);
  }
  SUBCASE("wrong magic") {
    std::stringstream bad("NOT-A-MODEL 1\n" + text.substr(text.find('\n') + 1));
    CHECK_THROWS_AS(NGramModel::load(bad), VersionMismatchError);
  }
  SUBCASE("wrong version") {
    std::stringstream bad("SOPG-NGRAM 9\n" + text.substr(text.find('\n') + 1));
    CHECK_THROWS_AS(NGramModel::load(bad), VersionMismatchError);
  }
  SUBCASE("garbage entry") {
    std::string t = text;
    const auto pos = t.find("entries");
    const auto line_end = t.find('\n', pos);
    t.insert(line_end + 1, "x,y,z\n");
    std::stringstream bad(t);
    CHECK_THROWS_AS(NGramModel::load(bad), CorruptFileError);
  }
}

TEST_CASE("hand-written model with no counts is uniform") {
  std::stringstream file("SOPG-NGRAM 1\norder 2\nsmoothing 1\nalphabet 65 66\nentries 0\nend\n");
  const auto m = NGramModel::load(file);
  const auto d = m.next_log_probs(prefix_of("ab"));
  CHECK(d[id('a')] == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(d[id('b')] == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(d[kEnd] == doctest::Approx(std::log(1.0 / 3.0)));
  CHECK(d[id('c')] == kNegInf);
}
