#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <sys/types.h>
#include <unordered_map>
#include <vector>

#include "sopg/model.hpp"

namespace sopg {

struct AdapterOptions {
  std::chrono::milliseconds timeout{30000};
  double normalization_tolerance = 1e-4;
  double determinism_tolerance = 1e-6;
  // Every n-th prefix sent is later re-queried and compared against the first
  // answer. 0 disables spot checks.
  std::uint64_t spot_check_every = 101;
};

// Client side of the external-model wire protocol. The adapter is a child
// process running `command` under /bin/sh, speaking one JSON object per line:
//
//   -> {"type":"hello","vocab_size":99,"protocol":1}
//   <- {"type":"ready","max_batch":B}
//   -> {"type":"infer","id":K,"prefixes":[[95,65,...],...]}
//   <- {"type":"dist","id":K,"log_probs":[[99 floats],...]}
//   -> {"type":"bye"}
//
// Prefixes are START-led and unpadded; log-probabilities at or below -1e30
// decode to -inf. Calls are serialized through one request pipeline, so the
// client can be shared by concurrent search workers.
class AdapterClient final : public ProbabilityModel {
 public:
  explicit AdapterClient(std::string command, AdapterOptions options = {});
  ~AdapterClient() override;

  AdapterClient(const AdapterClient&) = delete;
  AdapterClient& operator=(const AdapterClient&) = delete;

  NextSymbolDistribution next_log_probs(std::span<const TokenId> prefix) const override;
  std::vector<NextSymbolDistribution> next_log_probs_batch(
      std::span<const std::vector<TokenId>> prefixes) const override;
  std::string describe() const override { return "external(" + command_ + ")"; }

  int max_batch() const noexcept { return max_batch_; }
  std::uint64_t requests_sent() const noexcept { return next_id_; }

  // Sends bye and waits for the child. Idempotent; the destructor calls it.
  void shutdown();

 private:
  void send_line(const std::string& line) const;
  std::string read_line() const;
  std::vector<NextSymbolDistribution> exchange(std::span<const std::vector<TokenId>> prefixes) const;
  void spot_check(std::span<const std::vector<TokenId>> prefixes,
                  const std::vector<NextSymbolDistribution>& dists) const;

  std::string command_;
  AdapterOptions options_;
  pid_t child_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int max_batch_ = 1;

  mutable std::mutex mutex_;
  mutable std::string buffer_;
  mutable std::uint64_t next_id_ = 0;
  mutable std::uint64_t prefixes_seen_ = 0;
  mutable std::vector<std::pair<std::vector<TokenId>, NextSymbolDistribution>> pending_checks_;
};

// Outcome of the protocol conformance suite run against a live adapter.
struct ConformanceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConformanceReport {
  std::vector<ConformanceCheck> checks;
  bool passed() const;
};

// Handshake, batch alignment, determinism, normalization and START/BLANK
// masking, over a fixed set of probe prefixes.
ConformanceReport run_conformance(const AdapterClient& client);

}  // namespace sopg
