#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sopg/sopg.hpp"

namespace sopg {

// Operator-facing knobs for generate/sample runs. The file form is one
// `key = value` per line; `#` starts a comment.
struct RunConfig {
  double p_min = 1e-7;
  std::size_t capacity = 100000;
  std::vector<double> ladder{0.05, 0.005, 0.0005, 0.00005, 0.000005};
  int subsearches = 1;
  std::size_t fetch_k = 64;
  int max_len = 32;
  int min_len = 6;
  std::string model_path;
  std::string output_path;
  std::uint64_t seed = 0;
  bool packing = true;
  bool with_prob = false;
  PackedPriority packed_priority = PackedPriority::UpperBound;
  EmitPolicy emit_policy = EmitPolicy::OnPop;

  // Throws ConfigError on the first invalid field.
  void validate() const;
  SopgConfig to_sopg() const;

  // Applies one key/value pair; throws ConfigError for unknown keys or
  // unparsable values.
  void set(const std::string& key, const std::string& value);

  void write(std::ostream& out) const;
  static RunConfig read(std::istream& in);
  static RunConfig read_file(const std::string& path);

  bool operator==(const RunConfig&) const = default;
};

std::vector<double> parse_double_list(const std::string& text);
std::string format_double_list(const std::vector<double>& values);

}  // namespace sopg
