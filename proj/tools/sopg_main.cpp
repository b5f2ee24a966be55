// sopg: command-line front end for ordered candidate generation.
//
//   sopg clean     --in raw.txt --out clean.txt
//   sopg split     --in clean.txt --ratio 0.8 --seed 1 --train train.txt --test test.txt
//   sopg train     --corpus train.txt --order 3 --out model.ngram
//   sopg generate  --model model.ngram --p-min 1e-7 --capacity-n 100000 > guesses.txt
//   sopg sample    --model model.ngram --count 100000 --seed 3
//   sopg evaluate  --candidates guesses.txt --test test.txt --train train.txt
//   sopg compare   --mode cover|capacity|threshold ...
//   sopg oracle    --model model.ngram --p-min 1e-3 --max-len 4
//   sopg synth     --count 100000 --seed 1 --out corpus.txt
//   sopg adapter-check --model external:"python3 serve.py"

#include <atomic>
#include <cmath>
#include <unordered_set>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sopg/adapter.hpp"
#include "sopg/baselines.hpp"
#include "sopg/error.hpp"
#include "sopg/eval.hpp"
#include "sopg/ngram.hpp"
#include "sopg/protocols.hpp"
#include "sopg/run_config.hpp"
#include "sopg/sopg.hpp"

namespace {

using json = nlohmann::json;
using namespace sopg;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitModel = 4;
constexpr int kExitProtocol = 5;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted = true; }

std::unique_ptr<ProbabilityModel> open_model(const std::string& source) {
  if (source.empty()) throw ConfigError("--model is required");
  constexpr std::string_view kExternal = "external:";
  if (source.rfind(kExternal, 0) == 0) return std::make_unique<AdapterClient>(source.substr(kExternal.size()));
  return std::make_unique<NGramModel>(NGramModel::load_file(source));
}

// Candidate stream on stdout or a file.
class LineSink {
 public:
  explicit LineSink(const std::string& path) {
    if (path.empty() || path == "-") {
      file_ = stdout;
    } else {
      file_ = std::fopen(path.c_str(), "wb");
      if (!file_) throw IoError("cannot open '" + path + "' for writing");
      owned_ = true;
    }
  }
  ~LineSink() {
    if (owned_) std::fclose(file_);
  }
  LineSink(const LineSink&) = delete;
  LineSink& operator=(const LineSink&) = delete;

  void write(const std::string& line) {
    if (std::fputs(line.c_str(), file_) < 0 || std::fputc('\n', file_) == EOF)
      throw IoError("failed writing candidate stream");
  }
  void flush() { std::fflush(file_); }

 private:
  std::FILE* file_ = nullptr;
  bool owned_ = false;
};

void write_meta(const std::string& path, const json& record) {
  const std::string line = record.dump();
  if (path.empty()) {
    std::cerr << line << '\n';
    return;
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw IoError("cannot open metadata sink '" + path + "'");
  out << line << '\n';
}

std::string format_candidate(const CandidateRecord& rec, bool with_prob) {
  if (!with_prob) return rec.password;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f\t", rec.log_prob / std::log(10.0));
  return buf + rec.password;
}

json stats_json(const CorpusStats& s) {
  return {{"total", s.total},
          {"removed_charset", s.removed_charset},
          {"removed_length", s.removed_length},
          {"unique", s.unique},
          {"repetition_rate", s.repetition_rate}};
}

json report_json(const EvalReport& r) {
  return {{"generated", r.generated},   {"new_unique", r.new_unique}, {"match_number", r.match_number},
          {"hit_number", r.hit_number}, {"cover_rate", r.cover_rate}, {"effect_rate", r.effect_rate}};
}

// Prints rows as an aligned text table.
void print_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  auto line = [&](const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      s += cells[c];
      if (c + 1 < cells.size()) s += std::string(width[c] - cells[c].size() + 2, ' ');
    }
    std::cout << s << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

// Flags shared by generate and sample; applied over the config file only when
// given on the command line.
struct RunFlags {
  std::string config_file;
  std::string p_min, capacity, ladder, subsearches, fetch_k, max_len, min_len, model, output, seed, packing,
      packed_priority, emit;
  bool with_prob = false;
  std::string meta;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key=value config file");
    cmd->add_option("--model", model, "n-gram model file or external:<command>");
    cmd->add_option("--p-min", p_min, "path-probability cutoff P_min");
    cmd->add_option("--capacity-n", capacity, "frontier capacity N");
    cmd->add_option("--ladder", ladder, "packing thresholds P_0,...,P_s or none");
    cmd->add_option("--subsearches", subsearches, "concurrent sub-searches m");
    cmd->add_option("--fetch-k", fetch_k, "nodes fetched per refill k");
    cmd->add_option("--max-len", max_len, "maximum password length");
    cmd->add_option("--min-len", min_len, "minimum emitted length");
    cmd->add_option("--packing", packing, "on|off");
    cmd->add_option("--packed-priority", packed_priority, "upper-bound|parent");
    cmd->add_option("--emit", emit, "pop|expand");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", output, "candidate output file (default stdout)");
    cmd->add_option("--meta", meta, "append the run-summary JSON line here (default stderr)");
    cmd->add_flag("--with-prob", with_prob, "prefix each candidate with its log10 probability");
  }

  RunConfig resolve() const {
    RunConfig c = config_file.empty() ? RunConfig{} : RunConfig::read_file(config_file);
    auto apply = [&](const char* key, const std::string& v) {
      if (!v.empty()) c.set(key, v);
    };
    apply("p_min", p_min);
    apply("capacity_n", capacity);
    apply("ladder", ladder);
    apply("subsearches", subsearches);
    apply("fetch_k", fetch_k);
    apply("max_len", max_len);
    apply("min_len", min_len);
    apply("model", model);
    apply("output", output);
    apply("seed", seed);
    apply("packing", packing);
    apply("packed_priority", packed_priority);
    apply("emit", emit);
    if (with_prob) c.with_prob = true;
    c.validate();
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Ordered password-candidate generation from autoregressive models"};
  app.require_subcommand(1);

  // clean
  std::string clean_in, clean_out, clean_stats;
  auto* clean = app.add_subcommand("clean", "keep printable passwords of length 6..32");
  clean->add_option("--in", clean_in, "raw corpus")->required();
  clean->add_option("--out", clean_out, "cleaned corpus")->required();
  clean->add_option("--stats", clean_stats, "also write stats JSON here");

  // split
  std::string split_in, split_train, split_test;
  double split_ratio = 0.8;
  std::uint64_t split_seed = 0;
  auto* split = app.add_subcommand("split", "seeded random train/test split");
  split->add_option("--in", split_in)->required();
  split->add_option("--ratio", split_ratio, "train fraction");
  split->add_option("--seed", split_seed);
  split->add_option("--train", split_train)->required();
  split->add_option("--test", split_test)->required();

  // train
  std::string train_corpus, train_out, train_alphabet = "full";
  int train_order = 3;
  double train_smoothing = 0.01;
  auto* train = app.add_subcommand("train", "train a smoothed character n-gram model");
  train->add_option("--corpus", train_corpus)->required();
  train->add_option("--order", train_order, "n-gram order, 2..6");
  train->add_option("--smoothing", train_smoothing, "additive smoothing delta");
  train->add_option("--alphabet", train_alphabet, "full|corpus");
  train->add_option("--out", train_out)->required();

  // generate
  RunFlags gen_flags;
  auto* generate = app.add_subcommand("generate", "stream candidates in approximately descending probability");
  gen_flags.attach(generate);

  // sample
  RunFlags sample_flags;
  std::uint64_t sample_count = 1000;
  auto* sample = app.add_subcommand("sample", "ancestral random sampling baseline");
  sample_flags.attach(sample);
  sample->add_option("--count", sample_count, "number of samples");

  // evaluate
  std::string ev_candidates, ev_test, ev_train;
  auto* evaluate = app.add_subcommand("evaluate", "cover and effect rate of a candidate file");
  evaluate->add_option("--candidates", ev_candidates)->required();
  evaluate->add_option("--test", ev_test)->required();
  evaluate->add_option("--train", ev_train)->required();

  // compare
  RunFlags cmp_flags;
  std::string cmp_mode = "cover", cmp_test, cmp_train, cmp_json, cmp_values;
  double cmp_prune = 1e-9;
  std::uint64_t cmp_max_samples = 200'000'000;
  auto* compare = app.add_subcommand("compare", "comparison protocols: cover | capacity | threshold");
  cmp_flags.attach(compare);
  compare->add_option("--mode", cmp_mode, "cover|capacity|threshold");
  compare->add_option("--values", cmp_values,
                      "cover targets (%), capacities N, or p_min values, comma separated")
      ->required();
  compare->add_option("--test", cmp_test);
  compare->add_option("--train", cmp_train);
  compare->add_option("--prune-p-min", cmp_prune, "pruning threshold for capacity mode");
  compare->add_option("--max-samples", cmp_max_samples, "random-sampling give-up point");
  compare->add_option("--json", cmp_json, "also write the rows as JSON here");

  // oracle
  std::string or_model;
  double or_pmin = 0.01;
  int or_min = 1, or_max = 4;
  std::uint64_t or_limit = 5'000'000;
  bool or_prob = false;
  auto* oracle = app.add_subcommand("oracle", "exhaustive enumeration for tiny models");
  oracle->add_option("--model", or_model)->required();
  oracle->add_option("--p-min", or_pmin);
  oracle->add_option("--min-len", or_min);
  oracle->add_option("--max-len", or_max);
  oracle->add_option("--node-limit", or_limit);
  oracle->add_flag("--with-prob", or_prob);

  // synth
  SynthConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "write a seeded synthetic corpus");
  synth->add_option("--count", synth_cfg.count);
  synth->add_option("--seed", synth_cfg.seed);
  synth->add_option("--base-words", synth_cfg.base_words);
  synth->add_option("--out", synth_out)->required();

  // adapter-check
  std::string ac_model;
  auto* adapter_check = app.add_subcommand("adapter-check", "run the protocol conformance suite");
  adapter_check->add_option("--model", ac_model, "external:<command>")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  if (*clean) {
    const auto lines = read_lines_file(clean_in);
    const auto result = clean_corpus(lines);
    write_lines_file(clean_out, result.kept);
    const json s = stats_json(result.stats);
    std::cout << s.dump() << '\n';
    if (!clean_stats.empty()) {
      std::ofstream out(clean_stats);
      if (!out) throw IoError("cannot write '" + clean_stats + "'");
      out << s.dump() << '\n';
    }
    return 0;
  }

  if (*split) {
    const auto lines = read_lines_file(split_in);
    const auto parts = split_corpus(lines, split_ratio, split_seed);
    write_lines_file(split_train, parts.train);
    write_lines_file(split_test, parts.test);
    std::cout << json{{"train", parts.train.size()}, {"test", parts.test.size()}}.dump() << '\n';
    return 0;
  }

  if (*train) {
    AlphabetMode mode;
    if (train_alphabet == "full") mode = AlphabetMode::FullPrintable;
    else if (train_alphabet == "corpus") mode = AlphabetMode::CorpusAlphabet;
    else throw ConfigError("--alphabet must be full or corpus");
    const auto corpus = read_lines_file(train_corpus);
    const auto model = NGramModel::train(corpus, train_order, train_smoothing, mode);
    model.save_file(train_out);
    std::cout << json{{"model", model.describe()}, {"contexts", model.context_count()}}.dump() << '\n';
    return 0;
  }

  if (*generate) {
    const RunConfig cfg = gen_flags.resolve();
    const auto model = open_model(cfg.model_path);
    LineSink out(cfg.output_path);
    const auto stats = sopg_generate(*model, cfg.to_sopg(), [&](const CandidateRecord& rec) {
      out.write(format_candidate(rec, cfg.with_prob));
      return !g_interrupted.load();
    });
    out.flush();
    write_meta(gen_flags.meta, {{"type", "summary"},
                                {"emitted", stats.emitted},
                                {"inferences", stats.inferences},
                                {"ordinary_expansions", stats.ordinary_expansions},
                                {"packed_expansions", stats.packed_expansions},
                                {"peak_frontier", stats.peak_frontier},
                                {"wall_seconds", stats.wall_seconds},
                                {"interrupted", stats.stopped_early}});
    return 0;
  }

  if (*sample) {
    const RunConfig cfg = sample_flags.resolve();
    const auto model = open_model(cfg.model_path);
    LineSink out(cfg.output_path);
    SampleConfig sc;
    sc.count = sample_count;
    sc.seed = cfg.seed;
    sc.max_len = cfg.max_len;
    sc.min_len = sample_flags.min_len.empty() ? 0 : cfg.min_len;
    std::unordered_set<std::string> unique;
    const auto stats = random_sample_generate(*model, sc, [&](const SampleRecord& rec) {
      out.write(rec.password);
      unique.insert(rec.password);
      return !g_interrupted.load();
    });
    out.flush();
    write_meta(sample_flags.meta, {{"type", "summary"},
                                   {"generated", stats.generated},
                                   {"unique", unique.size()},
                                   {"inferences", stats.inferences}});
    return 0;
  }

  if (*evaluate) {
    const auto candidates = read_lines_file(ev_candidates);
    const auto test = unique_set(read_lines_file(ev_test));
    const auto train_set = unique_set(read_lines_file(ev_train));
    const auto report = sopg::evaluate(candidates, test, train_set);
    std::cout << report_json(report).dump() << '\n';
    return 0;
  }

  if (*compare) {
    const RunConfig cfg = cmp_flags.resolve();
    const auto model = open_model(cfg.model_path);
    const auto values = parse_double_list(cmp_values);
    json rows = json::array();
    if (cmp_mode == "capacity") {
      CapacityConfig cc;
      cc.prune_p_min = cmp_prune;
      cc.sopg = cfg.to_sopg();
      std::vector<std::size_t> caps;
      for (double v : values) caps.push_back(static_cast<std::size_t>(v));
      std::vector<std::vector<std::string>> table;
      for (const auto& r : frontier_capacity_sweep(*model, caps, cc)) {
        table.push_back({std::to_string(r.capacity), method_name(r.method), std::to_string(r.passwords_found)});
        rows.push_back({{"N", r.capacity}, {"method", method_name(r.method)}, {"passwords_found", r.passwords_found}});
      }
      print_table({"N", "Method", "Passwords"}, table);
    } else {
      if (cmp_test.empty() || cmp_train.empty()) throw ConfigError("--test and --train are required");
      const auto test = unique_set(read_lines_file(cmp_test));
      const auto train_set = unique_set(read_lines_file(cmp_train));
      std::vector<std::vector<std::string>> table;
      if (cmp_mode == "cover") {
        CompareConfig cc;
        cc.sopg = cfg.to_sopg();
        cc.sample_seed = cfg.seed;
        cc.max_samples = cmp_max_samples;
        for (const auto& r : compare_at_cover(*model, values, test, train_set, cc)) {
          table.push_back({pct(r.target), method_name(r.method), std::to_string(r.generated),
                           std::to_string(r.unique), std::to_string(r.inferences)});
          rows.push_back({{"cover_target", r.target},
                          {"method", method_name(r.method)},
                          {"generated", r.generated},
                          {"unique", r.unique},
                          {"inferences", r.inferences}});
        }
        print_table({"Cover Rate", "Method", "Generated", "Unique", "Inferences"}, table);
      } else if (cmp_mode == "threshold") {
        for (const auto& r : threshold_sweep(*model, values, test, train_set, cfg.to_sopg())) {
          table.push_back({sci(r.p_min), std::to_string(r.report.new_unique), std::to_string(r.report.match_number),
                           std::to_string(r.report.hit_number), pct(r.report.cover_rate),
                           pct(r.report.effect_rate)});
          json row = report_json(r.report);
          row["p_min"] = r.p_min;
          row["inferences"] = r.stats.inferences;
          rows.push_back(row);
        }
        print_table({"Search Threshold", "New_u", "Match Number", "Hit Number", "Cover Rate", "Effect Rate"},
                    table);
      } else {
        throw ConfigError("--mode must be cover, capacity or threshold");
      }
    }
    if (!cmp_json.empty()) {
      std::ofstream out(cmp_json);
      if (!out) throw IoError("cannot write '" + cmp_json + "'");
      out << rows.dump(2) << '\n';
    }
    return 0;
  }

  if (*oracle) {
    const auto model = open_model(or_model);
    for (const auto& s : brute_force_enumerate(*model, or_pmin, or_min, or_max, or_limit))
      std::cout << format_candidate({s.password, s.log_prob, 0}, or_prob) << '\n';
    return 0;
  }

  if (*synth) {
    write_lines_file(synth_out, synthesize_corpus(synth_cfg));
    return 0;
  }

  if (*adapter_check) {
    constexpr std::string_view kExternal = "external:";
    if (ac_model.rfind(kExternal, 0) != 0) throw ConfigError("adapter-check needs --model external:<command>");
    AdapterClient client(ac_model.substr(kExternal.size()));
    const auto report = run_conformance(client);
    for (const auto& c : report.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    return report.passed() ? 0 : kExitProtocol;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  try {
    return run(argc, argv);
  } catch (const sopg::Error& e) {
    std::cerr << "sopg: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::Config: return kExitConfig;
      case ErrorCategory::Io: return kExitIo;
      case ErrorCategory::Model: return kExitModel;
      case ErrorCategory::Protocol: return kExitProtocol;
      case ErrorCategory::Internal: return 1;
    }
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "sopg: " << e.what() << '\n';
    return 1;
  }
}
