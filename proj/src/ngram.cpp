#include "sopg/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sopg/error.hpp"

namespace sopg {

namespace {

constexpr const char* kMagic = "SOPG-NGRAM";
constexpr int kFormatVersion = 1;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_settings(int order, double smoothing) {
  if (order < NGramModel::kMinOrder || order > NGramModel::kMaxOrder)
    throw ConfigError("n-gram order must be in [2, 6], got " + std::to_string(order));
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing))
    throw ConfigError("smoothing must be a finite non-negative number");
}

}  // namespace

NGramModel::NGramModel(int order, double smoothing, std::vector<TokenId> alphabet)
    : order_(order), smoothing_(smoothing), alphabet_(std::move(alphabet)) {
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
}

std::uint64_t NGramModel::key(std::span<const TokenId> context) {
  // 7 bits per id, at most 5 ids; the length sits in the top byte so that
  // contexts of different lengths never collide.
  std::uint64_t k = static_cast<std::uint64_t>(context.size()) << 56;
  for (std::size_t i = 0; i < context.size(); ++i) k |= static_cast<std::uint64_t>(context[i]) << (7 * i);
  return k;
}

void NGramModel::add(std::span<const TokenId> context, TokenId next, std::uint64_t n) {
  auto& stats = contexts_[key(context)];
  stats.total += n;
  auto it = std::lower_bound(stats.counts.begin(), stats.counts.end(), next,
                             [](const auto& p, TokenId id) { return p.first < id; });
  if (it != stats.counts.end() && it->first == next)
    it->second += n;
  else
    stats.counts.insert(it, {next, n});
}

void NGramModel::finalize() {
  const double width = static_cast<double>(effective_size()) * smoothing_;
  log_uniform_ = -std::log(static_cast<double>(effective_size()));
  for (auto& [k, stats] : contexts_) {
    const double denom = static_cast<double>(stats.total) + width;
    stats.log_unseen = smoothing_ > 0.0 ? std::log(smoothing_ / denom) : kNegInf;
    stats.log_seen.clear();
    stats.log_seen.reserve(stats.counts.size());
    for (const auto& [id, c] : stats.counts)
      stats.log_seen.emplace_back(id, std::log((static_cast<double>(c) + smoothing_) / denom));
  }
  if (smoothing_ == 0.0 && contexts_.empty())
    throw ModelError("an unsmoothed n-gram model needs at least one transition");
}

NGramModel NGramModel::train(std::span<const std::string> corpus, int order, double smoothing,
                             AlphabetMode mode) {
  check_settings(order, smoothing);
  if (corpus.empty()) throw EmptyCorpusError("cannot train on an empty corpus");

  std::vector<TokenId> alphabet;
  if (mode == AlphabetMode::FullPrintable) {
    for (int i = 0; i < kPrintableCount; ++i) alphabet.push_back(static_cast<TokenId>(i));
  } else {
    std::array<bool, kPrintableCount> seen{};
    for (const auto& pw : corpus)
      for (char c : pw)
        if (is_printable(static_cast<unsigned char>(c))) seen[encode_char(c)] = true;
    for (int i = 0; i < kPrintableCount; ++i)
      if (seen[i]) alphabet.push_back(static_cast<TokenId>(i));
  }

  NGramModel model(order, smoothing, std::move(alphabet));
  std::vector<TokenId> seq;
  for (const auto& pw : corpus) {
    seq.assign(1, kStart);
    for (char c : pw) {
      if (!is_printable(static_cast<unsigned char>(c)))
        throw ModelError("training password contains a non-printable byte");
      seq.push_back(encode_char(c));
    }
    seq.push_back(kEnd);
    for (std::size_t i = 1; i < seq.size(); ++i) {
      const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order - 1), i);
      for (std::size_t len = 0; len <= longest; ++len)
        model.add(std::span<const TokenId>(seq).subspan(i - len, len), seq[i], 1);
    }
  }
  model.finalize();
  return model;
}

NGramModel NGramModel::from_counts(int order, double smoothing, std::vector<TokenId> alphabet,
                                   std::span<const Entry> entries) {
  check_settings(order, smoothing);
  for (TokenId id : alphabet)
    if (!is_printable_id(id)) throw ConfigError("alphabet may only hold printable ids");
  NGramModel model(order, smoothing, std::move(alphabet));
  for (const auto& e : entries) {
    if (static_cast<int>(e.context.size()) > order - 1)
      throw ConfigError("context longer than order - 1");
    for (std::size_t i = 0; i < e.context.size(); ++i) {
      const bool ok = is_printable_id(e.context[i]) || (i == 0 && e.context[i] == kStart);
      if (!ok) throw ConfigError("invalid id in n-gram context");
    }
    const bool next_ok = e.next == kEnd ||
                         std::binary_search(model.alphabet_.begin(), model.alphabet_.end(), e.next);
    if (!next_ok) throw ConfigError("n-gram successor outside the model alphabet");
    if (e.count == 0) continue;
    model.add(e.context, e.next, e.count);
  }
  if (smoothing == 0.0 && model.contexts_.empty())
    throw ModelError("an unsmoothed n-gram model needs at least one transition");
  model.finalize();
  return model;
}

NextSymbolDistribution NGramModel::next_log_probs(std::span<const TokenId> prefix) const {
  validate_prefix(prefix);
  NextSymbolDistribution dist;
  const std::size_t longest = std::min<std::size_t>(static_cast<std::size_t>(order_ - 1), prefix.size());
  for (std::size_t len = longest + 1; len-- > 0;) {
    auto it = contexts_.find(key(prefix.subspan(prefix.size() - len, len)));
    if (it == contexts_.end() || it->second.total == 0) continue;
    const ContextStats& stats = it->second;
    for (TokenId id : alphabet_) dist.log_probs[id] = stats.log_unseen;
    dist.log_probs[kEnd] = stats.log_unseen;
    for (const auto& [id, lp] : stats.log_seen) dist.log_probs[id] = lp;
    return dist;
  }
  // Nothing seen at all: with smoothing this is the uniform distribution.
  for (TokenId id : alphabet_) dist.log_probs[id] = log_uniform_;
  dist.log_probs[kEnd] = log_uniform_;
  return dist;
}

std::string NGramModel::describe() const {
  return "ngram(order=" + std::to_string(order_) + ", smoothing=" + format_double(smoothing_) +
         ", alphabet=" + std::to_string(alphabet_.size()) + ")";
}

std::uint64_t NGramModel::count(std::span<const TokenId> context, TokenId next) const {
  auto it = contexts_.find(key(context));
  if (it == contexts_.end()) return 0;
  for (const auto& [id, c] : it->second.counts)
    if (id == next) return c;
  return 0;
}

std::uint64_t NGramModel::context_total(std::span<const TokenId> context) const {
  auto it = contexts_.find(key(context));
  return it == contexts_.end() ? 0 : it->second.total;
}

std::vector<NGramModel::Entry> NGramModel::entries() const {
  std::vector<Entry> out;
  for (const auto& [k, stats] : contexts_) {
    const std::size_t len = static_cast<std::size_t>(k >> 56);
    std::vector<TokenId> ctx(len);
    for (std::size_t i = 0; i < len; ++i) ctx[i] = static_cast<TokenId>((k >> (7 * i)) & 0x7F);
    for (const auto& [id, c] : stats.counts) out.push_back({ctx, id, c});
  }
  std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
    if (a.context.size() != b.context.size()) return a.context.size() < b.context.size();
    if (a.context != b.context) return a.context < b.context;
    return a.next < b.next;
  });
  return out;
}

// Layout:
//   SOPG-NGRAM 1
//   order <n>
//   smoothing <delta>
//   alphabet <id> <id> ...
//   entries <count>
//   <ctx id>,...,<next id>,<count>      one per entry, sorted
//   end
void NGramModel::save(std::ostream& out) const {
  const auto all = entries();
  out << kMagic << ' ' << kFormatVersion << '\n';
  out << "order " << order_ << '\n';
  out << "smoothing " << format_double(smoothing_) << '\n';
  out << "alphabet";
  for (TokenId id : alphabet_) out << ' ' << static_cast<int>(id);
  out << '\n';
  out << "entries " << all.size() << '\n';
  for (const auto& e : all) {
    for (TokenId id : e.context) out << static_cast<int>(id) << ',';
    out << static_cast<int>(e.next) << ',' << e.count << '\n';
  }
  out << "end\n";
  if (!out) throw IoError("failed writing n-gram model");
}

namespace {

std::string expect_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw CorruptFileError(std::string("model file truncated before ") + what);
  return line;
}

std::string expect_field(const std::string& line, const std::string& name) {
  if (line.rfind(name + " ", 0) != 0 && line != name)
    throw CorruptFileError("expected '" + name + "' line, got '" + line + "'");
  return line.size() > name.size() ? line.substr(name.size() + 1) : std::string();
}

long long parse_int(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw CorruptFileError("bad integer '" + s + "'");
  }
  if (pos != s.size()) throw CorruptFileError("bad integer '" + s + "'");
  return v;
}

}  // namespace

NGramModel NGramModel::load(std::istream& in) {
  const std::string header = expect_line(in, "header");
  {
    std::istringstream hs(header);
    std::string magic;
    int version = -1;
    hs >> magic >> version;
    if (magic != kMagic) throw VersionMismatchError("not an n-gram model file (bad magic)");
    if (version != kFormatVersion)
      throw VersionMismatchError("unsupported model format version " + std::to_string(version));
  }
  const int order = static_cast<int>(parse_int(expect_field(expect_line(in, "order"), "order")));
  double smoothing = 0.0;
  {
    const std::string s = expect_field(expect_line(in, "smoothing"), "smoothing");
    char* end = nullptr;
    smoothing = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw CorruptFileError("bad smoothing value");
  }
  std::vector<TokenId> alphabet;
  {
    std::istringstream as(expect_field(expect_line(in, "alphabet"), "alphabet"));
    std::string tok;
    while (as >> tok) {
      const long long id = parse_int(tok);
      if (id < 0 || id >= kPrintableCount) throw CorruptFileError("alphabet id out of range");
      alphabet.push_back(static_cast<TokenId>(id));
    }
  }
  const long long n = parse_int(expect_field(expect_line(in, "entries"), "entries"));
  if (n < 0) throw CorruptFileError("negative entry count");
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const std::string line = expect_line(in, "end of entries");
    std::vector<long long> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(parse_int(line.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2) throw CorruptFileError("entry needs at least next,count");
    Entry e;
    for (std::size_t f = 0; f + 2 < fields.size(); ++f) {
      if (fields[f] < 0 || fields[f] >= kVocabSize) throw CorruptFileError("context id out of range");
      e.context.push_back(static_cast<TokenId>(fields[f]));
    }
    const long long next = fields[fields.size() - 2];
    const long long count = fields.back();
    if (next < 0 || next >= kVocabSize || count < 0) throw CorruptFileError("bad entry values");
    e.next = static_cast<TokenId>(next);
    e.count = static_cast<std::uint64_t>(count);
    entries.push_back(std::move(e));
  }
  if (expect_line(in, "end marker") != "end") throw CorruptFileError("missing end marker");
  try {
    return from_counts(order, smoothing, std::move(alphabet), entries);
  } catch (const ConfigError& e) {
    throw CorruptFileError(std::string("invalid model contents: ") + e.what());
  }
}

void NGramModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  save(out);
}

NGramModel NGramModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  return load(in);
}

}  // namespace sopg
