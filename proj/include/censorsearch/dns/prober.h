#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "censorsearch/dns/codec.h"

namespace censorsearch::dns {

enum class Verdict { kCensored, kNotCensored, kInconclusive };

std::string_view to_string(Verdict verdict);
std::optional<Verdict> parse_verdict(std::string_view name);

// An address inside the censored network that runs no DNS service. Only
// validated targets take part in verdicts.
struct ProbeTarget {
  std::string address;
  std::uint16_t port = 53;
  bool validated = false;

  std::string endpoint() const;  // "ip:port", IPv6 in brackets
  bool operator==(const ProbeTarget&) const = default;
};

// "ip", "ip:port", "[v6]" or "[v6]:port". Throws std::invalid_argument.
ProbeTarget parse_target(std::string_view text);
// One target per line; blank and '#' lines skipped.
std::vector<ProbeTarget> load_targets(const std::filesystem::path& path);

struct ProbeEvidence {
  std::string target;
  bool txid_matched = false;
  std::vector<std::string> answer_ips;
  std::chrono::milliseconds rtt{0};

  bool operator==(const ProbeEvidence&) const = default;
};

struct ProbeOutcome {
  std::string host;
  Verdict verdict = Verdict::kInconclusive;
  std::uint32_t responses_seen = 0;  // fully matching responses
  std::uint32_t trials = 0;          // trials completed
  std::vector<ProbeEvidence> evidence;

  bool operator==(const ProbeOutcome&) const = default;
};

// True iff the datagram is a response (QR=1) carrying the probe's txid and
// question. Garbled datagrams are never injections.
bool is_injected_response(std::span<const std::uint8_t> datagram,
                          const DnsQuestion& probe);

// The inference rule over a complete response stream: Censored iff at least
// one datagram is a fully matching response, NotCensored otherwise.
Verdict judge_stream(const std::vector<Bytes>& datagrams, const DnsQuestion& probe);

struct ProbeSettings {
  int trials = 3;
  std::chrono::duration<double> wait{2.0};
  int validation_trials = 3;
  std::size_t max_in_flight = 32;
};

// Sends A queries over UDP to probe targets and listens for injected answers.
// Every probe owns its sockets, so concurrent calls are safe.
class DnsProber {
 public:
  explicit DnsProber(ProbeSettings settings = {});

  // Sends the control query validation_trials times. The target is valid iff
  // nothing answers: an answer means it runs DNS or the control is censored.
  bool validate_target(ProbeTarget& target, const std::string& control_host);

  // Per trial: one query with a fresh random txid to each validated target,
  // then listen for `wait`. Stops at the first matching response. No
  // validated target, an unencodable name or a socket failure give
  // Inconclusive.
  ProbeOutcome probe_host(const std::string& host, std::span<const ProbeTarget> targets);

  // probe_host over many hosts, at most max_in_flight at once. Output order
  // follows `hosts`.
  std::vector<ProbeOutcome> probe_hosts(const std::vector<std::string>& hosts,
                                        std::span<const ProbeTarget> targets);

  std::uint64_t datagrams_sent() const { return datagrams_sent_; }
  std::uint64_t decode_errors() const { return decode_errors_; }
  const ProbeSettings& settings() const { return settings_; }

 private:
  ProbeOutcome run_trials(const std::string& host, std::span<const ProbeTarget> targets,
                          int trials);

  ProbeSettings settings_;
  std::atomic<std::uint64_t> datagrams_sent_{0};
  std::atomic<std::uint64_t> decode_errors_{0};
};

}  // namespace censorsearch::dns
