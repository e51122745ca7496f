#include "censorsearch/net/url.h"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace censorsearch {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::string normalize_host(std::string_view host) {
  std::string out = lower(host);
  if (!out.empty() && out.back() == '.') out.pop_back();
  return out;
}

std::optional<ParsedUrl> parse_http_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) return std::nullopt;
  ParsedUrl out;
  out.scheme = lower(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  std::string_view rest = url.substr(scheme_end + 3);
  const auto authority_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, authority_end);
  std::string_view tail = authority_end == std::string_view::npos
                              ? std::string_view{}
                              : rest.substr(authority_end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) return std::nullopt;
    host = authority.substr(1, close - 1);
    const auto after = authority.substr(close + 1);
    if (!after.empty()) {
      if (after.front() != ':') return std::nullopt;
      port = after.substr(1);
    }
  } else if (const auto colon = authority.rfind(':');
             colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port = authority.substr(colon + 1);
  }
  if (host.empty()) return std::nullopt;
  for (unsigned char c : host) {
    if (std::isspace(c) || c < 0x20) return std::nullopt;
  }
  out.host = normalize_host(host);
  if (out.host.empty()) return std::nullopt;
  out.port = out.is_https() ? 443 : 80;
  if (!port.empty()) {
    unsigned value = 0;
    const auto [ptr, ec] =
        std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value == 0 ||
        value > 65535) {
      return std::nullopt;
    }
    out.port = static_cast<std::uint16_t>(value);
  }
  if (const auto hash = tail.find('#'); hash != std::string_view::npos) {
    tail = tail.substr(0, hash);
  }
  out.target = std::string(tail);
  if (out.target.empty() || out.target.front() != '/') {
    out.target.insert(out.target.begin(), '/');
  }
  return out;
}

std::string host_of(std::string_view url) {
  auto parsed = parse_http_url(url);
  return parsed ? parsed->host : std::string{};
}

bool host_matches_suffix(std::string_view host_in, std::string_view suffix_in) {
  const std::string host = normalize_host(host_in);
  const std::string suffix = normalize_host(suffix_in);
  if (suffix.empty() || host.size() < suffix.size()) return false;
  if (!host.ends_with(suffix)) return false;
  return host.size() == suffix.size() ||
         host[host.size() - suffix.size() - 1] == '.';
}

std::string url_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0x0F]);
    }
  }
  return out;
}

std::string resolve_location(const ParsedUrl& base, std::string_view location) {
  if (location.find("://") != std::string_view::npos) return std::string(location);
  const bool default_port = (base.is_https() && base.port == 443) ||
                            (!base.is_https() && base.port == 80);
  std::string origin = base.scheme + "://" + base.host;
  if (!default_port) origin += ":" + std::to_string(base.port);
  if (location.starts_with("//")) {
    return base.scheme + ":" + std::string(location);
  }
  if (location.starts_with("/")) return origin + std::string(location);
  std::string path = base.target.substr(0, base.target.find('?'));
  path = path.substr(0, path.rfind('/') + 1);
  return origin + path + std::string(location);
}

}  // namespace censorsearch
