#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace censorsearch {

struct ParsedUrl {
  std::string scheme;  // lowercase, "http" or "https"
  std::string host;    // lowercase, no trailing dot, no brackets
  std::uint16_t port = 0;
  std::string target;  // path plus query, always starts with '/'

  bool is_https() const { return scheme == "https"; }
};

// Accepts absolute http/https URLs only.
std::optional<ParsedUrl> parse_http_url(std::string_view url);

// Lowercases and strips one trailing dot.
std::string normalize_host(std::string_view host);

// Hostname of an absolute http/https URL, normalized; empty if unparseable.
std::string host_of(std::string_view url);

// Label-aligned suffix match: "a.example.com" and "example.com" both match
// suffix "example.com"; "notexample.com" does not.
bool host_matches_suffix(std::string_view host, std::string_view suffix);

// Percent-encodes everything except RFC 3986 unreserved characters.
std::string url_encode(std::string_view text);

// Resolves a redirect Location header against the URL that produced it.
std::string resolve_location(const ParsedUrl& base, std::string_view location);

}  // namespace censorsearch
