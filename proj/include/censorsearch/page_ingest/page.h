#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>

#include "censorsearch/util/time.h"

namespace censorsearch {

// A fetched page reduced to its plain text. Immutable once built.
struct PageDocument {
  std::string url;
  std::string host;
  std::string body_text;
  Timestamp fetched_at{};
  std::size_t content_bytes_read = 0;

  bool operator==(const PageDocument&) const = default;
};

struct FetchPolicy {
  std::chrono::duration<double> timeout{10.0};
  std::size_t max_body_bytes = 1 << 20;
  int max_redirects = 5;
  std::string user_agent = "censorsearch/1.0";
  std::chrono::duration<double> per_host_delay{1.0};
  std::size_t max_in_flight = 16;
  bool respect_robots = true;

  // Throws std::invalid_argument on a non-positive timeout or body cap, or a
  // negative redirect limit.
  void validate() const;
};

class FetchError : public std::runtime_error {
 public:
  enum class Kind {
    kTimeout,
    kTooManyRedirects,
    kNonHtmlContent,
    kTransportFailure,
    kDisallowedByRobots,
  };

  FetchError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string_view to_string(FetchError::Kind kind);

// Strips markup, script/style bodies and comments from an HTML document and
// collapses whitespace. Bytes are decoded using `declared_charset` when
// given, else a <meta> declaration, else UTF-8; invalid sequences become
// U+FFFD. Literal '<' and '&' text, and the '<', '>' and '&' entities, come
// out as fullwidth forms, so the result is a fixpoint of this function.
std::string extract_text(std::string_view html_bytes,
                         std::optional<std::string_view> declared_charset = {});

// Charset handling.
std::optional<std::string> charset_from_content_type(std::string_view content_type);
std::optional<std::string> sniff_meta_charset(std::string_view html_bytes);
std::string decode_to_utf8(std::string_view bytes, std::string_view charset);
// Collapses whitespace and maps '<' and '&' to fullwidth forms; used for
// text/plain bodies.
std::string normalize_plain_text(std::string_view text);

// Builds a PageDocument from an HTTP response. Throws kNonHtmlContent for
// anything that is not HTML or plain text. The body is truncated at
// max_body_bytes before decoding.
PageDocument build_document(std::string_view url, std::string_view content_type,
                            std::string_view body, std::size_t max_body_bytes,
                            Timestamp fetched_at);

class PageSource {
 public:
  virtual ~PageSource() = default;
  virtual PageDocument fetch(const std::string& url) = 0;
};

// Per-host politeness: each acquire() reserves the next free slot for the
// host under a lock and sleeps until it arrives.
class HostRateLimiter {
 public:
  explicit HostRateLimiter(std::chrono::duration<double> delay) : delay_(delay) {}
  void acquire(const std::string& host);

 private:
  using Clock = std::chrono::steady_clock;
  std::chrono::duration<double> delay_;
  std::mutex mutex_;
  std::unordered_map<std::string, Clock::time_point> next_slot_;
};

class RobotsRules {
 public:
  static RobotsRules parse(std::string_view robots_txt, std::string_view user_agent);
  static RobotsRules allow_all() { return {}; }
  bool allowed(std::string_view path) const;

 private:
  // prefix -> allow
  std::map<std::string, bool> rules_;
};

class HttpPageFetcher : public PageSource {
 public:
  explicit HttpPageFetcher(FetchPolicy policy);
  PageDocument fetch(const std::string& url) override;

 private:
  struct RawResponse {
    int status = 0;
    std::string content_type;
    std::string location;
    std::string body;
    std::size_t bytes_read = 0;
  };
  RawResponse get(const std::string& url, bool skip_type_check);
  const RobotsRules& robots_for(const std::string& origin);

  FetchPolicy policy_;
  HostRateLimiter limiter_;
  std::counting_semaphore<1024> in_flight_;
  std::mutex robots_mutex_;
  std::unordered_map<std::string, std::unique_ptr<RobotsRules>> robots_;
};

// Convenience wrapper: one fetch with a fresh fetcher.
PageDocument fetch_page(const std::string& url, const FetchPolicy& policy);

// Serves canned responses keyed by URL; used by tests and simulation runs.
class FixturePageSource : public PageSource {
 public:
  struct Entry {
    std::string content_type = "text/html; charset=utf-8";
    std::string body;
  };

  explicit FixturePageSource(std::size_t max_body_bytes = 1 << 20)
      : max_body_bytes_(max_body_bytes) {}
  void add(std::string url, Entry entry);
  PageDocument fetch(const std::string& url) override;
  std::size_t fetch_count() const;

 private:
  std::size_t max_body_bytes_;
  std::map<std::string, Entry> entries_;
  mutable std::mutex mutex_;
  std::size_t fetch_count_ = 0;
};

}  // namespace censorsearch
