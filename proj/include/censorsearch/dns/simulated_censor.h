#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "censorsearch/dns/codec.h"
#include "censorsearch/dns/prober.h"

namespace censorsearch::dns {

// In-process UDP responder standing in for a probe target behind an on-path
// DNS injector. Listens on a loopback port and, depending on mode, forges
// answers for censored names, answers everything (a misconfigured target
// that runs a resolver), or answers nothing.
class SimulatedCensor {
 public:
  enum class Mode { kInjector, kResolver, kBlackhole };

  struct Options {
    Mode mode = Mode::kInjector;
    // Exact hostnames; an entry "*.example.com" covers every subdomain.
    std::set<std::string> censored_hosts;
    std::chrono::duration<double> latency{0.0};
    std::vector<Ipv4> forged_answers = {{203, 0, 113, 7}};
    // Also send decoys for every query: one with a flipped txid and one
    // answering a different name. These must never count as injections.
    bool emit_noise = false;
    std::string bind_address = "127.0.0.1";
  };

  explicit SimulatedCensor(Options options);
  ~SimulatedCensor();
  SimulatedCensor(const SimulatedCensor&) = delete;
  SimulatedCensor& operator=(const SimulatedCensor&) = delete;

  ProbeTarget target() const;
  std::uint16_t port() const { return port_; }

  bool is_censored(const std::string& host) const;
  void set_censored(std::set<std::string> hosts);

  std::uint64_t queries_received() const { return queries_; }
  std::uint64_t injections_sent() const { return injections_; }

 private:
  void serve();

  Options options_;
  mutable std::mutex mutex_;
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
  std::atomic<std::uint64_t> queries_{0};
  std::atomic<std::uint64_t> injections_{0};
  std::thread worker_;
};

}  // namespace censorsearch::dns
