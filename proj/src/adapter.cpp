#include "sopg/adapter.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "sopg/error.hpp"

namespace sopg {

namespace {

using json = nlohmann::json;

constexpr double kWireNegInf = -1e30;

void close_fd(int& fd) {
  if (fd >= 0) ::close(fd);
  fd = -1;
}

}  // namespace

AdapterClient::AdapterClient(std::string command, AdapterOptions options)
    : command_(std::move(command)), options_(options) {
  // A dead adapter must surface as a protocol error, not kill the engine.
  std::signal(SIGPIPE, SIG_IGN);

  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0)
    throw IoError(std::string("pipe failed: ") + std::strerror(errno));

  child_ = ::fork();
  if (child_ < 0) throw IoError(std::string("fork failed: ") + std::strerror(errno));
  if (child_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);

  try {
    send_line(json{{"type", "hello"}, {"vocab_size", kVocabSize}, {"protocol", 1}}.dump());
    json reply;
    try {
      reply = json::parse(read_line());
    } catch (const json::parse_error& e) {
      throw ProtocolError(std::string("malformed handshake reply: ") + e.what());
    }
    if (reply.value("type", "") != "ready") throw ProtocolError("adapter did not answer hello with ready");
    max_batch_ = reply.value("max_batch", 0);
    if (max_batch_ < 1) throw ProtocolError("adapter reported max_batch < 1");
  } catch (...) {
    shutdown();
    throw;
  }
}

AdapterClient::~AdapterClient() {
  try {
    shutdown();
  } catch (...) {
  }
}

void AdapterClient::shutdown() {
  std::lock_guard lock(mutex_);
  if (child_ < 0) return;
  if (to_child_ >= 0) {
    const std::string bye = json{{"type", "bye"}}.dump() + "\n";
    [[maybe_unused]] auto n = ::write(to_child_, bye.data(), bye.size());
  }
  close_fd(to_child_);
  close_fd(from_child_);
  int status = 0;
  for (int i = 0; i < 200; ++i) {
    if (::waitpid(child_, &status, WNOHANG) == child_) {
      child_ = -1;
      return;
    }
    ::usleep(10000);
  }
  ::kill(child_, SIGKILL);
  ::waitpid(child_, &status, 0);
  child_ = -1;
}

void AdapterClient::send_line(const std::string& line) const {
  std::string data = line + "\n";
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("adapter write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string AdapterClient::read_line() const {
  const auto deadline = std::chrono::steady_clock::now() + options_.timeout;
  while (true) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("adapter did not answer in time");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (rc == 0) throw TimeoutError("adapter did not answer in time");
    char chunk[65536];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("adapter read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw ProtocolError("adapter closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<NextSymbolDistribution> AdapterClient::exchange(
    std::span<const std::vector<TokenId>> prefixes) const {
  const std::uint64_t id = next_id_++;
  json request{{"type", "infer"}, {"id", id}, {"prefixes", json::array()}};
  for (const auto& p : prefixes) {
    json ids = json::array();
    for (TokenId t : p) ids.push_back(static_cast<int>(t));
    request["prefixes"].push_back(std::move(ids));
  }
  send_line(request.dump());

  json reply;
  try {
    reply = json::parse(read_line());
  } catch (const json::parse_error& e) {
    throw ProtocolError(std::string("malformed adapter response: ") + e.what());
  }
  if (!reply.is_object() || reply.value("type", "") != "dist")
    throw ProtocolError("expected a dist response");
  if (!reply.contains("id") || !reply["id"].is_number_unsigned() || reply["id"].get<std::uint64_t>() != id)
    throw ProtocolError("response id does not match request id " + std::to_string(id));
  const auto& rows = reply["log_probs"];
  if (!rows.is_array() || rows.size() != prefixes.size())
    throw ProtocolError("response carries the wrong number of distributions");

  std::vector<NextSymbolDistribution> out(prefixes.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(kVocabSize))
      throw ProtocolError("distribution must have exactly 99 entries");
    for (int i = 0; i < kVocabSize; ++i) {
      if (!row[i].is_number()) throw ProtocolError("non-numeric log-probability");
      const double v = row[i].get<double>();
      if (std::isnan(v) || v > 1e-9) throw ProtocolError("log-probability out of range");
      out[r].log_probs[i] = v <= kWireNegInf ? kNegInf : v;
    }
    if (out[r][kStart] != kNegInf || out[r][kBlank] != kNegInf)
      throw ProtocolError("adapter assigned mass to START or BLANK");
    const double sum = out[r].exp_sum();
    if (std::abs(sum - 1.0) > options_.normalization_tolerance)
      throw NormalizationError("distribution sums to " + std::to_string(sum));
  }
  return out;
}

void AdapterClient::spot_check(std::span<const std::vector<TokenId>> prefixes,
                               const std::vector<NextSymbolDistribution>& dists) const {
  if (options_.spot_check_every == 0) return;
  // Re-query anything queued by earlier calls before queueing new samples,
  // so that a check always crosses at least one request boundary.
  if (!pending_checks_.empty()) {
    std::vector<std::vector<TokenId>> again;
    for (const auto& [p, d] : pending_checks_) again.push_back(p);
    const auto fresh = exchange(again);
    for (std::size_t i = 0; i < again.size(); ++i)
      if (max_abs_difference(fresh[i], pending_checks_[i].second) > options_.determinism_tolerance)
        throw DeterminismError("adapter returned different distributions for the same prefix");
    pending_checks_.clear();
  }
  for (std::size_t i = 0; i < prefixes.size(); ++i)
    if (prefixes_seen_++ % options_.spot_check_every == 0) pending_checks_.emplace_back(prefixes[i], dists[i]);
}

std::vector<NextSymbolDistribution> AdapterClient::next_log_probs_batch(
    std::span<const std::vector<TokenId>> prefixes) const {
  for (const auto& p : prefixes) validate_prefix(p);
  std::lock_guard lock(mutex_);
  if (child_ < 0) throw ProtocolError("adapter already shut down");
  std::vector<NextSymbolDistribution> out;
  out.reserve(prefixes.size());
  for (std::size_t off = 0; off < prefixes.size(); off += static_cast<std::size_t>(max_batch_)) {
    const auto chunk = prefixes.subspan(off, std::min<std::size_t>(max_batch_, prefixes.size() - off));
    auto dists = exchange(chunk);
    spot_check(chunk, dists);
    for (auto& d : dists) out.push_back(std::move(d));
  }
  return out;
}

NextSymbolDistribution AdapterClient::next_log_probs(std::span<const TokenId> prefix) const {
  const std::vector<std::vector<TokenId>> one{std::vector<TokenId>(prefix.begin(), prefix.end())};
  return next_log_probs_batch(one).front();
}

bool ConformanceReport::passed() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

ConformanceReport run_conformance(const AdapterClient& client) {
  ConformanceReport report;
  auto record = [&](std::string name, auto&& body) {
    ConformanceCheck check{std::move(name), false, {}};
    try {
      check.detail = body();
      check.passed = check.detail.empty();
    } catch (const std::exception& e) {
      check.detail = e.what();
    }
    report.checks.push_back(std::move(check));
  };

  const std::vector<std::vector<TokenId>> probes{
      {kStart},
      {kStart, encode_char('a')},
      {kStart, encode_char('p'), encode_char('a'), encode_char('s'), encode_char('s')},
      {kStart, encode_char('1'), encode_char('2'), encode_char('3')},
  };

  record("handshake", [&]() -> std::string {
    return client.max_batch() >= 1 ? "" : "max_batch < 1";
  });
  record("normalization", [&]() -> std::string {
    for (const auto& d : client.next_log_probs_batch(probes))
      if (std::abs(d.exp_sum() - 1.0) > 1e-4) return "exp-sum off by more than 1e-4";
    return "";
  });
  record("masking", [&]() -> std::string {
    for (const auto& d : client.next_log_probs_batch(probes))
      if (d[kStart] != kNegInf || d[kBlank] != kNegInf) return "START or BLANK has mass";
    return "";
  });
  record("determinism", [&]() -> std::string {
    const auto a = client.next_log_probs(probes[2]);
    const auto b = client.next_log_probs(probes[2]);
    return max_abs_difference(a, b) <= 1e-6 ? "" : "repeated query differs";
  });
  record("batch alignment", [&]() -> std::string {
    const auto batch = client.next_log_probs_batch(probes);
    if (batch.size() != probes.size()) return "wrong batch size";
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (max_abs_difference(batch[i], client.next_log_probs(probes[i])) > 1e-6)
        return "batched answer " + std::to_string(i) + " differs from single query";
    return "";
  });
  return report;
}

}  // namespace sopg
