#include "censorsearch/dns/simulated_censor.h"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <queue>

namespace censorsearch::dns {

SimulatedCensor::SimulatedCensor(Options options) : options_(std::move(options)) {
  std::set<std::string> normalized;
  for (auto host : options_.censored_hosts) {
    std::transform(host.begin(), host.end(), host.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    normalized.insert(std::move(host));
  }
  options_.censored_hosts = std::move(normalized);

  fd_ = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd_ < 0) throw std::runtime_error(std::string("socket: ") + std::strerror(errno));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = 0;
  if (inet_pton(AF_INET, options_.bind_address.c_str(), &addr.sin_addr) != 1 ||
      ::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd_);
    throw std::runtime_error("cannot bind simulated censor to " + options_.bind_address);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  worker_ = std::thread([this] { serve(); });
}

SimulatedCensor::~SimulatedCensor() {
  stop_ = true;
  if (worker_.joinable()) worker_.join();
  if (fd_ >= 0) ::close(fd_);
}

ProbeTarget SimulatedCensor::target() const {
  return ProbeTarget{options_.bind_address, port_, false};
}

bool SimulatedCensor::is_censored(const std::string& host) const {
  std::string name = host;
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (!name.empty() && name.back() == '.') name.pop_back();
  std::lock_guard lock(mutex_);
  if (options_.censored_hosts.contains(name)) return true;
  for (auto dot = name.find('.'); dot != std::string::npos; dot = name.find('.', dot + 1)) {
    if (options_.censored_hosts.contains("*" + name.substr(dot))) return true;
  }
  return false;
}

void SimulatedCensor::set_censored(std::set<std::string> hosts) {
  std::lock_guard lock(mutex_);
  options_.censored_hosts = std::move(hosts);
}

void SimulatedCensor::serve() {
  using Clock = std::chrono::steady_clock;
  struct Reply {
    Clock::time_point due;
    sockaddr_in to;
    Bytes packet;
    bool operator>(const Reply& other) const { return due > other.due; }
  };
  std::priority_queue<Reply, std::vector<Reply>, std::greater<>> outbox;
  const auto latency = std::chrono::duration_cast<Clock::duration>(options_.latency);

  while (!stop_) {
    int timeout_ms = 20;
    if (!outbox.empty()) {
      const auto until = std::chrono::duration_cast<std::chrono::milliseconds>(
          outbox.top().due - Clock::now());
      timeout_ms = std::clamp<int>(static_cast<int>(until.count()), 0, 20);
    }
    pollfd pfd{fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, timeout_ms);
    if (ready > 0 && (pfd.revents & POLLIN)) {
      std::array<std::uint8_t, 1500> buf{};
      sockaddr_in from{};
      socklen_t from_len = sizeof(from);
      const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), MSG_DONTWAIT,
                                   reinterpret_cast<sockaddr*>(&from), &from_len);
      if (n > 0) {
        ++queries_;
        try {
          const DnsQuestion q = decode_query({buf.data(), static_cast<std::size_t>(n)});
          const auto due = Clock::now() + latency;
          if (options_.emit_noise) {
            DnsQuestion flipped = q;
            flipped.txid = static_cast<std::uint16_t>(q.txid ^ 0xFFFF);
            outbox.push({due, from, encode_response(flipped, options_.forged_answers)});
            if (q.qname.size() < 200) {
              DnsQuestion other = q;
              other.qname = "decoy." + q.qname;
              outbox.push({due, from, encode_response(other, options_.forged_answers)});
            }
            // A copy of the query itself (QR=0) echoed back.
            outbox.push({due, from, encode_query(q)});
          }
          const bool answer = options_.mode == Mode::kResolver ||
                              (options_.mode == Mode::kInjector && is_censored(q.qname));
          if (answer) {
            outbox.push({due, from, encode_response(q, options_.forged_answers)});
            ++injections_;
          }
        } catch (const std::exception&) {
          // Garbage in, nothing out.
        }
      }
    }
    while (!outbox.empty() && outbox.top().due <= Clock::now()) {
      const Reply& r = outbox.top();
      ::sendto(fd_, r.packet.data(), r.packet.size(), 0,
               reinterpret_cast<const sockaddr*>(&r.to), sizeof(r.to));
      outbox.pop();
    }
  }
}

}  // namespace censorsearch::dns
