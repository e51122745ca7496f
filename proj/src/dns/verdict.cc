#include <arpa/inet.h>

#include <algorithm>
#include <charconv>
#include <fstream>

#include "censorsearch/dns/prober.h"

namespace censorsearch::dns {

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kCensored: return "Censored";
    case Verdict::kNotCensored: return "NotCensored";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::optional<Verdict> parse_verdict(std::string_view name) {
  if (name == "Censored") return Verdict::kCensored;
  if (name == "NotCensored") return Verdict::kNotCensored;
  if (name == "Inconclusive") return Verdict::kInconclusive;
  return std::nullopt;
}

std::string ProbeTarget::endpoint() const {
  if (address.find(':') != std::string::npos) {
    return "[" + address + "]:" + std::to_string(port);
  }
  return address + ":" + std::to_string(port);
}

ProbeTarget parse_target(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  ProbeTarget target;
  std::string_view port;
  if (text.starts_with("[")) {
    const auto close = text.find(']');
    if (close == std::string_view::npos) {
      throw std::invalid_argument("unterminated IPv6 target: " + std::string(text));
    }
    target.address = std::string(text.substr(1, close - 1));
    auto rest = text.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') throw std::invalid_argument("bad target: " + std::string(text));
      port = rest.substr(1);
    }
  } else if (std::count(text.begin(), text.end(), ':') == 1) {
    const auto colon = text.find(':');
    target.address = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  } else {
    target.address = std::string(text);
  }
  in6_addr scratch{};
  if (inet_pton(AF_INET, target.address.c_str(), &scratch) != 1 &&
      inet_pton(AF_INET6, target.address.c_str(), &scratch) != 1) {
    throw std::invalid_argument("target is not an IP address: " + std::string(text));
  }
  if (!port.empty()) {
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value == 0 ||
        value > 65535) {
      throw std::invalid_argument("bad target port: " + std::string(text));
    }
    target.port = static_cast<std::uint16_t>(value);
  }
  return target;
}

std::vector<ProbeTarget> load_targets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read targets file " + path.string());
  std::vector<ProbeTarget> targets;
  for (std::string line; std::getline(in, line);) {
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    targets.push_back(parse_target(line));
  }
  return targets;
}

bool is_injected_response(std::span<const std::uint8_t> datagram,
                          const DnsQuestion& probe) {
  try {
    return decode_response(datagram, probe).kind == ResponseKind::kMatching;
  } catch (const DecodeError&) {
    return false;
  }
}

Verdict judge_stream(const std::vector<Bytes>& datagrams, const DnsQuestion& probe) {
  for (const auto& d : datagrams) {
    if (is_injected_response(d, probe)) return Verdict::kCensored;
  }
  return Verdict::kNotCensored;
}

}  // namespace censorsearch::dns
