#include "sopg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <random>
#include <unordered_map>

#include "sopg/error.hpp"

namespace sopg {

CleanResult clean_corpus(std::span<const std::string> lines) {
  CleanResult out;
  for (const auto& line : lines) {
    const bool printable = std::all_of(line.begin(), line.end(),
                                       [](char c) { return is_printable(static_cast<unsigned char>(c)); });
    if (!printable) {
      ++out.stats.removed_charset;
      continue;
    }
    const auto len = static_cast<int>(line.size());
    if (len < kCleanMinLen || len > kCleanMaxLen) {
      ++out.stats.removed_length;
      continue;
    }
    out.kept.push_back(line);
  }
  out.stats.total = out.kept.size();
  out.stats.unique = unique_set(out.kept).size();
  out.stats.repetition_rate =
      out.stats.total == 0 ? 0.0 : 1.0 - static_cast<double>(out.stats.unique) / static_cast<double>(out.stats.total);
  return out;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("failed reading input lines");
  return lines;
}

std::vector<std::string> read_lines_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_lines(in);
}

void write_lines_file(const std::string& path, std::span<const std::string> lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw IoError("failed writing '" + path + "'");
}

Split split_corpus(std::span<const std::string> passwords, double ratio, std::uint64_t seed) {
  if (passwords.empty()) throw EmptyCorpusError("cannot split an empty corpus");
  if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split ratio must lie in (0, 1)");
  std::vector<std::size_t> order(passwords.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the partition does not depend on
  // the standard library's shuffle implementation.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(passwords.size())));
  std::vector<bool> in_train(passwords.size(), false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[order[i]] = true;
  Split out;
  for (std::size_t i = 0; i < passwords.size(); ++i)
    (in_train[i] ? out.train : out.test).push_back(passwords[i]);
  return out;
}

PasswordSet unique_set(std::span<const std::string> passwords) {
  return PasswordSet(passwords.begin(), passwords.end());
}

PasswordSet test_minus_train(const PasswordSet& test, const PasswordSet& train) {
  PasswordSet out;
  for (const auto& p : test)
    if (!train.contains(p)) out.insert(p);
  return out;
}

namespace {

std::uint64_t count_hits(const PasswordSet& generated, const PasswordSet& targets) {
  std::uint64_t hits = 0;
  const auto& small = generated.size() < targets.size() ? generated : targets;
  const auto& large = generated.size() < targets.size() ? targets : generated;
  for (const auto& p : small)
    if (large.contains(p)) ++hits;
  return hits;
}

}  // namespace

double cover_rate(const PasswordSet& generated_unique, const PasswordSet& test, const PasswordSet& train) {
  const auto targets = test_minus_train(test, train);
  if (targets.empty()) throw ConfigError("Test - Train is empty; cover rate undefined");
  return 100.0 * static_cast<double>(count_hits(generated_unique, targets)) / static_cast<double>(targets.size());
}

double effect_rate(const PasswordSet& generated_unique, const PasswordSet& test, const PasswordSet& train) {
  if (generated_unique.empty()) throw ConfigError("no generated passwords; effect rate undefined");
  const auto targets = test_minus_train(test, train);
  return 100.0 * static_cast<double>(count_hits(generated_unique, targets)) /
         static_cast<double>(generated_unique.size());
}

EvalReport evaluate(std::span<const std::string> generated, const PasswordSet& test, const PasswordSet& train) {
  CoverTracker tracker(test, train);
  for (const auto& p : generated) tracker.add(p);
  return tracker.report();
}

CoverTracker::CoverTracker(const PasswordSet& test, const PasswordSet& train)
    : targets_(test_minus_train(test, train)), test_(test) {
  if (targets_.empty()) throw ConfigError("Test - Train is empty; cover rate undefined");
}

bool CoverTracker::add(const std::string& password) {
  ++generated_;
  if (!seen_.insert(password).second) return false;
  if (test_.contains(password)) ++matches_;
  if (!targets_.contains(password)) return false;
  ++hits_;
  return true;
}

double CoverTracker::cover_rate() const {
  return 100.0 * static_cast<double>(hits_) / static_cast<double>(targets_.size());
}

double CoverTracker::effect_rate() const {
  return seen_.empty() ? 0.0 : 100.0 * static_cast<double>(hits_) / static_cast<double>(seen_.size());
}

EvalReport CoverTracker::report() const {
  return {generated_, seen_.size(), matches_, hits_, cover_rate(), effect_rate()};
}

std::uint64_t count_ascending_pairs(std::span<const double> values) {
  std::vector<double> a(values.begin(), values.end());
  std::vector<double> tmp(a.size());
  std::uint64_t count = 0;
  // Bottom-up merge sort into descending order; every time an element of the
  // right run is strictly larger than the left-run head, it jumps all the
  // remaining left elements.
  for (std::size_t width = 1; width < a.size(); width *= 2) {
    for (std::size_t lo = 0; lo < a.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, a.size());
      const std::size_t hi = std::min(lo + 2 * width, a.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (a[j] > a[i]) {
          count += mid - i;
          tmp[k++] = a[j++];
        } else {
          tmp[k++] = a[i++];
        }
      }
      while (i < mid) tmp[k++] = a[i++];
      while (j < hi) tmp[k++] = a[j++];
    }
    std::swap(a, tmp);
  }
  return count;
}

OrderingQuality ordering_quality(std::span<const CandidateRecord> emitted, std::span<const ScoredPassword> oracle) {
  {
    std::unordered_map<std::string, int> expected;
    for (const auto& o : oracle) ++expected[o.password];
    bool ok = emitted.size() == oracle.size();
    for (const auto& e : emitted)
      if (ok && --expected[e.password] < 0) ok = false;
    if (!ok)
      throw SetMismatchError("emitted set differs from the oracle set (" + std::to_string(emitted.size()) +
                             " emitted vs " + std::to_string(oracle.size()) + " expected)");
  }
  OrderingQuality q;
  const std::size_t n = emitted.size();
  if (n < 2) return q;
  std::vector<double> lps;
  lps.reserve(n);
  for (const auto& e : emitted) lps.push_back(e.log_prob);
  q.discordant_pairs = count_ascending_pairs(lps);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  q.kendall_tau = 1.0 - 2.0 * static_cast<double>(q.discordant_pairs) / pairs;
  std::uint64_t adjacent = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (lps[i + 1] > lps[i]) ++adjacent;
  q.inversion_fraction = static_cast<double>(adjacent) / static_cast<double>(n - 1);
  return q;
}

namespace {

class ZipfSampler {
 public:
  ZipfSampler(std::size_t n, double exponent) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) cdf_[i] = (acc += 1.0 / std::pow(static_cast<double>(i + 1), exponent));
    for (auto& c : cdf_) c /= acc;
  }

  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return static_cast<std::size_t>(std::lower_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) %
           cdf_.size();
  }

 private:
  std::vector<double> cdf_;
};

std::string make_word(std::mt19937_64& rng) {
  static const std::string onsets[] = {"b",  "c",  "d",  "f",  "g",  "h",  "j",  "k",  "l",  "m",
                                       "n",  "p",  "r",  "s",  "t",  "v",  "w",  "ch", "sh", "th",
                                       "st", "tr", "br", "cr", "fl", "gr", "pl", "sk", "sp", ""};
  static const std::string vowels[] = {"a", "e", "i", "o", "u", "y", "ee", "oo", "ai", "ea", "ie", "ou"};
  static const std::string codas[] = {"", "", "", "n", "r", "s", "t", "l", "m", "ck", "nd", "ng", "rt", "x"};
  auto pick = [&](const auto& arr) {
    const auto n = std::size(arr);
    return arr[static_cast<std::size_t>(rng() % n)];
  };
  const int syllables = 1 + static_cast<int>(rng() % 3);
  std::string w;
  for (int s = 0; s < syllables; ++s) w += pick(onsets) + pick(vowels) + pick(codas);
  return w;
}

std::string decorate(std::string word, std::mt19937_64& rng) {
  static const char* suffixes[] = {"1",   "12",   "123", "1234", "01",  "007", "69",   "99",
                                   "11",  "22",   "13",  "21",   "2",   "3",   "7",    "!",
                                   "!!",  "@",    "#1",  "*",    "777", "00",  "4ever", "x"};
  static const ZipfSampler suffix_pick(std::size(suffixes), 1.1);
  const auto style = rng() % 100;
  if (style < 8) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
  } else if (style < 11) {
    for (auto& c : word) {
      if (c == 'a') c = '4';
      else if (c == 'e') c = '3';
      else if (c == 'o') c = '0';
      else if (c == 'i') c = '1';
      else if (c == 's') c = '$';
    }
  }
  const auto tail = rng() % 100;
  if (tail < 38) {
    word += suffixes[suffix_pick(rng)];
  } else if (tail < 52) {
    word += std::to_string(1960 + rng() % 50);
  } else if (tail < 60) {
    word += std::to_string(rng() % 100);
  } else if (tail < 64) {
    word += word;
  }
  while (word.size() < static_cast<std::size_t>(kCleanMinLen)) word += std::to_string(rng() % 10);
  if (word.size() > static_cast<std::size_t>(kCleanMaxLen)) word.resize(kCleanMaxLen);
  return word;
}

std::string random_string(std::mt19937_64& rng) {
  static const std::string pool = "abcdefghijklmnopqrstuvwxyz0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ!@#$%&*.";
  const std::size_t len = 6 + rng() % 7;
  std::string s;
  for (std::size_t i = 0; i < len; ++i) {
    // Mostly lowercase and digits.
    const auto r = rng() % 100;
    const std::size_t span = r < 70 ? 36 : pool.size();
    s.push_back(pool[static_cast<std::size_t>(rng() % span)]);
  }
  return s;
}

}  // namespace

std::vector<std::string> synthesize_corpus(const SynthConfig& config) {
  if (config.base_words == 0) throw ConfigError("synthetic corpus needs at least one base word");
  std::mt19937_64 rng(config.seed);
  std::vector<std::string> words;
  words.reserve(config.base_words);
  for (std::size_t i = 0; i < config.base_words; ++i) words.push_back(make_word(rng));

  // A popular pool of whole passwords drawn with heavy skew creates the
  // repeated head; fresh decorations of base words form the long tail.
  std::vector<std::string> popular;
  for (std::size_t i = 0; i < config.base_words; ++i) popular.push_back(decorate(words[i], rng));
  const ZipfSampler pop_pick(popular.size(), config.zipf_exponent);
  const ZipfSampler word_pick(words.size(), config.zipf_exponent);

  std::vector<std::string> out;
  out.reserve(config.count);
  while (out.size() < config.count) {
    const auto kind = rng() % 100;
    if (kind < 45)
      out.push_back(popular[pop_pick(rng)]);
    else if (kind < 93)
      out.push_back(decorate(words[word_pick(rng)], rng));
    else
      out.push_back(random_string(rng));
  }
  return out;
}

}  // namespace sopg
