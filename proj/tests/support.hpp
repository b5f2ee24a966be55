#pragma once

// Toy models and desk-scale fixtures shared by the unit and acceptance suites.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sopg/model.hpp"
#include "sopg/ngram.hpp"
#include "sopg/sopg.hpp"

namespace sopg::testing {

// Uniform over the given characters plus END at every step.
class UniformModel final : public ProbabilityModel {
 public:
  explicit UniformModel(std::string chars) : chars_(std::move(chars)) {}

  NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const override {
    validate_prefix(prefix);
    NextSymbolDistribution d;
    const double lp = -std::log(static_cast<double>(chars_.size() + 1));
    for (char c : chars_) d[encode_char(c)] = lp;
    d[kEnd] = lp;
    return d;
  }
  std::string describe() const override { return "uniform(" + chars_ + ")"; }

 private:
  std::string chars_;
};

// Distribution chosen by a callback on the decoded prefix. Keys are single
// characters, or "$" for END.
class TableModel final : public ProbabilityModel {
 public:
  using Table = std::map<std::string, double>;
  explicit TableModel(std::function<Table(const std::string&)> fn) : fn_(std::move(fn)) {}

  NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const override {
    validate_prefix(prefix);
    NextSymbolDistribution d;
    for (const auto& [sym, p] : fn_(decode_input(prefix))) {
      if (p <= 0.0) continue;
      d[sym == "$" ? kEnd : encode_char(sym[0])] = std::log(p);
    }
    return d;
  }
  std::string describe() const override { return "table"; }

 private:
  std::function<Table(const std::string&)> fn_;
};

struct Fixture {
  std::string name;
  NGramModel model;
  double p_min;
  int min_len;
  int max_len;
};

// Seeded n-gram fixture over a small printable alphabet (3..8 symbols),
// max_len 4..6, trained on a random word list from that alphabet.
inline Fixture make_fixture(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  static const std::string pool = "abcdefghijklmnopqrstuvwxyz0123456789!@#";
  std::string alphabet;
  const int size = 3 + static_cast<int>(rng() % 6);
  while (static_cast<int>(alphabet.size()) < size) {
    const char c = pool[rng() % pool.size()];
    if (alphabet.find(c) == std::string::npos) alphabet.push_back(c);
  }
  const int max_len = 4 + static_cast<int>(rng() % 3);
  std::vector<std::string> corpus;
  // Skewed character choice so that the model is far from uniform.
  std::geometric_distribution<int> skew(0.45);
  const int words = 20 + static_cast<int>(rng() % 200);
  for (int w = 0; w < words; ++w) {
    const int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_len + 2));
    std::string s;
    for (int i = 0; i < len; ++i) s.push_back(alphabet[static_cast<std::size_t>(skew(rng)) % alphabet.size()]);
    corpus.push_back(s);
  }
  const int order = 2 + static_cast<int>(rng() % 3);
  const double smoothing = 0.05 + 0.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  auto model = NGramModel::train(corpus, order, smoothing, AlphabetMode::CorpusAlphabet);
  const double p_min = std::pow(10.0, -(2.0 + 2.5 * std::uniform_real_distribution<double>(0.0, 1.0)(rng)));
  const int min_len = static_cast<int>(rng() % 3);
  return {"fixture-" + std::to_string(seed) + " |A|=" + std::to_string(size) + " n=" + std::to_string(order) +
              " L=" + std::to_string(max_len),
          std::move(model), p_min, min_len, max_len};
}

inline SopgConfig fixture_config(const Fixture& f) {
  SopgConfig c;
  c.p_min = f.p_min;
  c.min_len = f.min_len;
  c.max_len = f.max_len;
  return c;
}

inline std::vector<CandidateRecord> run_sopg(const ProbabilityModel& model, const SopgConfig& cfg,
                                             SearchStats* stats = nullptr) {
  std::vector<CandidateRecord> out;
  const auto s = sopg_generate(model, cfg, [&](const CandidateRecord& r) {
    out.push_back(r);
    return true;
  });
  if (stats) *stats = s;
  return out;
}

}  // namespace sopg::testing
