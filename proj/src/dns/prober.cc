#include "censorsearch/dns/prober.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <spdlog/spdlog.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <random>

#include "censorsearch/util/parallel.h"

namespace censorsearch::dns {
namespace {

class SocketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UdpSocket {
 public:
  explicit UdpSocket(int family) : fd_(::socket(family, SOCK_DGRAM | SOCK_CLOEXEC, 0)) {
    if (fd_ < 0) throw SocketError(std::string("socket: ") + std::strerror(errno));
  }
  ~UdpSocket() {
    if (fd_ >= 0) ::close(fd_);
  }
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  int fd() const { return fd_; }

 private:
  int fd_;
};

struct Endpoint {
  sockaddr_storage addr{};
  socklen_t len = 0;
  int family = AF_INET;
};

Endpoint to_endpoint(const ProbeTarget& target) {
  Endpoint ep;
  auto* v4 = reinterpret_cast<sockaddr_in*>(&ep.addr);
  auto* v6 = reinterpret_cast<sockaddr_in6*>(&ep.addr);
  if (inet_pton(AF_INET, target.address.c_str(), &v4->sin_addr) == 1) {
    v4->sin_family = AF_INET;
    v4->sin_port = htons(target.port);
    ep.len = sizeof(sockaddr_in);
    ep.family = AF_INET;
  } else if (inet_pton(AF_INET6, target.address.c_str(), &v6->sin6_addr) == 1) {
    v6->sin6_family = AF_INET6;
    v6->sin6_port = htons(target.port);
    ep.len = sizeof(sockaddr_in6);
    ep.family = AF_INET6;
  } else {
    throw SocketError("target is not an IP address: " + target.address);
  }
  return ep;
}

std::string describe(const sockaddr_storage& addr) {
  char buf[INET6_ADDRSTRLEN] = {};
  if (addr.ss_family == AF_INET) {
    const auto* v4 = reinterpret_cast<const sockaddr_in*>(&addr);
    inet_ntop(AF_INET, &v4->sin_addr, buf, sizeof(buf));
    return std::string(buf) + ":" + std::to_string(ntohs(v4->sin_port));
  }
  const auto* v6 = reinterpret_cast<const sockaddr_in6*>(&addr);
  inet_ntop(AF_INET6, &v6->sin6_addr, buf, sizeof(buf));
  return "[" + std::string(buf) + "]:" + std::to_string(ntohs(v6->sin6_port));
}

std::uint16_t random_txid() {
  thread_local std::mt19937 rng{std::random_device{}()};
  return std::uniform_int_distribution<std::uint16_t>{}(rng);
}

}  // namespace

DnsProber::DnsProber(ProbeSettings settings) : settings_(settings) {
  if (settings_.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (settings_.validation_trials < 1) {
    throw std::invalid_argument("validation_trials must be >= 1");
  }
  if (settings_.wait.count() <= 0) throw std::invalid_argument("wait must be > 0");
}

ProbeOutcome DnsProber::run_trials(const std::string& host,
                                   std::span<const ProbeTarget> targets, int trials) {
  using Clock = std::chrono::steady_clock;
  ProbeOutcome outcome;
  outcome.host = host;
  if (targets.empty()) return outcome;

  std::vector<Endpoint> endpoints;
  for (const auto& t : targets) endpoints.push_back(to_endpoint(t));
  std::optional<UdpSocket> v4;
  std::optional<UdpSocket> v6;
  for (const auto& ep : endpoints) {
    if (ep.family == AF_INET && !v4) v4.emplace(AF_INET);
    if (ep.family == AF_INET6 && !v6) v6.emplace(AF_INET6);
  }
  std::vector<pollfd> fds;
  if (v4) fds.push_back({v4->fd(), POLLIN, 0});
  if (v6) fds.push_back({v6->fd(), POLLIN, 0});

  struct Pending {
    DnsQuestion question;
    std::size_t target;
    Clock::time_point sent;
  };

  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Pending> pending;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      DnsQuestion q{host, kTypeA, kClassIn, random_txid()};
      const Bytes packet = encode_query(q);
      const int fd = endpoints[i].family == AF_INET ? v4->fd() : v6->fd();
      const auto sent = Clock::now();
      if (::sendto(fd, packet.data(), packet.size(), 0,
                   reinterpret_cast<const sockaddr*>(&endpoints[i].addr),
                   endpoints[i].len) < 0) {
        throw SocketError(std::string("sendto: ") + std::strerror(errno));
      }
      ++datagrams_sent_;
      pending.push_back({std::move(q), i, sent});
    }

    const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                             settings_.wait);
    while (true) {
      const auto remaining = deadline - Clock::now();
      if (remaining <= Clock::duration::zero()) break;
      const int timeout_ms = static_cast<int>(std::ceil(
          std::chrono::duration<double, std::milli>(remaining).count()));
      const int ready = ::poll(fds.data(), fds.size(), timeout_ms);
      if (ready < 0) {
        if (errno == EINTR) continue;
        throw SocketError(std::string("poll: ") + std::strerror(errno));
      }
      for (const auto& p : fds) {
        if (!(p.revents & POLLIN)) continue;
        std::array<std::uint8_t, 1500> buf{};
        while (true) {
          sockaddr_storage from{};
          socklen_t from_len = sizeof(from);
          const ssize_t n = ::recvfrom(p.fd, buf.data(), buf.size(), MSG_DONTWAIT,
                                       reinterpret_cast<sockaddr*>(&from), &from_len);
          if (n < 0) break;
          const auto received = Clock::now();
          const std::span<const std::uint8_t> datagram(buf.data(), static_cast<std::size_t>(n));
          if (datagram.size() < kHeaderSize) {
            ++decode_errors_;
            continue;
          }
          const std::uint16_t id = static_cast<std::uint16_t>((buf[0] << 8) | buf[1]);
          bool recorded = false;
          for (const auto& pend : pending) {
            if (pend.question.txid != id) continue;
            try {
              const auto decoded = decode_response(datagram, pend.question);
              const auto rtt = std::chrono::duration_cast<std::chrono::milliseconds>(
                  received - pend.sent);
              const bool match = decoded.kind == ResponseKind::kMatching;
              outcome.evidence.push_back({targets[pend.target].endpoint(), match,
                                          decoded.response.answers, rtt});
              recorded = true;
              if (match) {
                ++outcome.responses_seen;
                outcome.trials = static_cast<std::uint32_t>(trial + 1);
                outcome.verdict = Verdict::kCensored;
                return outcome;
              }
            } catch (const DecodeError&) {
              ++decode_errors_;
              recorded = true;
            }
            break;
          }
          if (!recorded) {
            outcome.evidence.push_back({describe(from), false, {}, {}});
          }
        }
      }
    }
    outcome.trials = static_cast<std::uint32_t>(trial + 1);
  }
  outcome.verdict = Verdict::kNotCensored;
  return outcome;
}

bool DnsProber::validate_target(ProbeTarget& target, const std::string& control_host) {
  target.validated = false;
  try {
    const ProbeTarget one[] = {target};
    const auto outcome = run_trials(control_host, one, settings_.validation_trials);
    target.validated = outcome.verdict == Verdict::kNotCensored;
  } catch (const std::exception& e) {
    spdlog::warn("validating target {} failed: {}", target.endpoint(), e.what());
  }
  return target.validated;
}

ProbeOutcome DnsProber::probe_host(const std::string& host,
                                   std::span<const ProbeTarget> targets) {
  std::vector<ProbeTarget> usable;
  for (const auto& t : targets) {
    if (t.validated) usable.push_back(t);
  }
  if (usable.empty()) return ProbeOutcome{host, Verdict::kInconclusive, 0, 0, {}};
  try {
    return run_trials(host, usable, settings_.trials);
  } catch (const EncodeError& e) {
    spdlog::warn("cannot probe '{}': {}", host, e.what());
  } catch (const SocketError& e) {
    spdlog::warn("probe of '{}' aborted: {}", host, e.what());
  }
  return ProbeOutcome{host, Verdict::kInconclusive, 0, 0, {}};
}

std::vector<ProbeOutcome> DnsProber::probe_hosts(const std::vector<std::string>& hosts,
                                                 std::span<const ProbeTarget> targets) {
  return parallel_map<ProbeOutcome>(
      hosts.size(), settings_.max_in_flight,
      [&](std::size_t i) { return probe_host(hosts[i], targets); });
}

}  // namespace censorsearch::dns
