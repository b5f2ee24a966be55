#include "sopg/run_config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>

#include "sopg/error.hpp"

namespace sopg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw ConfigError("bad number for " + key + ": '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long n = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return n;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad flag for " + key + ": '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty() || t == "none") return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = t.find(',', start);
    out.push_back(to_double("list", trim(t.substr(start, comma - start))));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  if (values.empty()) return "none";
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + fmt(values[i]);
  return s;
}

void RunConfig::validate() const {
  to_sopg().validate();
  if (capacity < 1) throw ConfigError("capacity-n must be >= 1");
}

SopgConfig RunConfig::to_sopg() const {
  SopgConfig c;
  c.p_min = p_min;
  c.capacity = capacity;
  c.ladder = packing ? PackingLadder(ladder) : PackingLadder::none();
  c.max_len = max_len;
  c.min_len = min_len;
  c.subsearches = subsearches;
  c.fetch_k = fetch_k;
  c.packed_priority = packed_priority;
  c.emit_policy = emit_policy;
  return c;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (key == "p_min") p_min = to_double(key, v);
  else if (key == "capacity_n") {
    const auto n = to_int(key, v);
    if (n < 1) throw ConfigError("capacity_n must be >= 1");
    capacity = static_cast<std::size_t>(n);
  } else if (key == "ladder") ladder = parse_double_list(v);
  else if (key == "subsearches") subsearches = static_cast<int>(to_int(key, v));
  else if (key == "fetch_k") {
    const auto n = to_int(key, v);
    if (n < 1) throw ConfigError("fetch_k must be >= 1");
    fetch_k = static_cast<std::size_t>(n);
  } else if (key == "max_len") max_len = static_cast<int>(to_int(key, v));
  else if (key == "min_len") min_len = static_cast<int>(to_int(key, v));
  else if (key == "model") model_path = v;
  else if (key == "output") output_path = v;
  else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(key, v));
  else if (key == "packing") packing = to_bool(key, v);
  else if (key == "with_prob") with_prob = to_bool(key, v);
  else if (key == "packed_priority") {
    if (v == "parent") packed_priority = PackedPriority::Parent;
    else if (v == "upper-bound") packed_priority = PackedPriority::UpperBound;
    else throw ConfigError("packed_priority must be parent or upper-bound");
  } else if (key == "emit") {
    if (v == "pop") emit_policy = EmitPolicy::OnPop;
    else if (v == "expand") emit_policy = EmitPolicy::OnExpand;
    else throw ConfigError("emit must be pop or expand");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::write(std::ostream& out) const {
  out << "p_min = " << fmt(p_min) << '\n'
      << "capacity_n = " << capacity << '\n'
      << "ladder = " << format_double_list(ladder) << '\n'
      << "subsearches = " << subsearches << '\n'
      << "fetch_k = " << fetch_k << '\n'
      << "max_len = " << max_len << '\n'
      << "min_len = " << min_len << '\n'
      << "model = " << model_path << '\n'
      << "output = " << output_path << '\n'
      << "seed = " << seed << '\n'
      << "packing = " << (packing ? "on" : "off") << '\n'
      << "with_prob = " << (with_prob ? "on" : "off") << '\n'
      << "packed_priority = " << (packed_priority == PackedPriority::Parent ? "parent" : "upper-bound") << '\n'
      << "emit = " << (emit_policy == EmitPolicy::OnPop ? "pop" : "expand") << '\n';
}

RunConfig RunConfig::read(std::istream& in) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + " lacks '='");
    c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  c.validate();
  return c;
}

RunConfig RunConfig::read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  return read(in);
}

}  // namespace sopg
