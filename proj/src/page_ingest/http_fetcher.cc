#include <httplib.h>

#include <algorithm>

#include "censorsearch/net/url.h"
#include "censorsearch/page_ingest/page.h"

namespace censorsearch {
namespace {

bool acceptable_type(std::string content_type) {
  std::transform(content_type.begin(), content_type.end(), content_type.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return content_type.empty() || content_type.find("text/html") != std::string::npos ||
         content_type.find("application/xhtml+xml") != std::string::npos ||
         content_type.find("text/plain") != std::string::npos;
}

std::string origin_of(const ParsedUrl& url) {
  std::string host = url.host.find(':') != std::string::npos ? "[" + url.host + "]"
                                                             : url.host;
  return url.scheme + "://" + host + ":" + std::to_string(url.port);
}

}  // namespace

HttpPageFetcher::HttpPageFetcher(FetchPolicy policy)
    : policy_(std::move(policy)),
      limiter_(policy_.per_host_delay),
      in_flight_(static_cast<std::ptrdiff_t>(
          std::min<std::size_t>(policy_.max_in_flight == 0 ? 1 : policy_.max_in_flight,
                                1024))) {
  policy_.validate();
}

HttpPageFetcher::RawResponse HttpPageFetcher::get(const std::string& url,
                                                  bool skip_type_check) {
  const auto parsed = parse_http_url(url);
  if (!parsed) {
    throw FetchError(FetchError::Kind::kTransportFailure, "invalid URL: " + url);
  }
  httplib::Client client(origin_of(*parsed));
  const auto timeout =
      std::chrono::duration_cast<std::chrono::microseconds>(policy_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  client.set_follow_location(false);
  const httplib::Headers headers = {{"User-Agent", policy_.user_agent}};

  RawResponse raw;
  bool stopped_early = false;
  const auto started = std::chrono::steady_clock::now();
  auto result = client.Get(
      parsed->target, headers,
      [&](const httplib::Response& response) {
        raw.status = response.status;
        raw.content_type = response.get_header_value("Content-Type");
        raw.location = response.get_header_value("Location");
        const bool redirect = response.status >= 300 && response.status < 400;
        const bool unwanted = response.status >= 200 && response.status < 300 &&
                              !acceptable_type(raw.content_type) && !skip_type_check;
        if (redirect || unwanted) {
          stopped_early = true;
          return false;
        }
        return true;
      },
      [&](const char* data, std::size_t length) {
        const std::size_t room = policy_.max_body_bytes - raw.body.size();
        raw.body.append(data, std::min(length, room));
        raw.bytes_read = raw.body.size();
        if (length >= room) {
          stopped_early = true;
          return false;
        }
        return true;
      });
  if (!result && !(stopped_early && result.error() == httplib::Error::Canceled)) {
    const auto elapsed = std::chrono::steady_clock::now() - started;
    const bool timed_out =
        result.error() == httplib::Error::ConnectionTimeout ||
        (result.error() == httplib::Error::Read && elapsed >= timeout * 9 / 10);
    throw FetchError(timed_out ? FetchError::Kind::kTimeout
                               : FetchError::Kind::kTransportFailure,
                     url + ": " + httplib::to_string(result.error()));
  }
  return raw;
}

const RobotsRules& HttpPageFetcher::robots_for(const std::string& origin) {
  {
    std::lock_guard lock(robots_mutex_);
    if (auto it = robots_.find(origin); it != robots_.end()) return *it->second;
  }
  auto rules = std::make_unique<RobotsRules>(RobotsRules::allow_all());
  try {
    const RawResponse raw = get(origin + "/robots.txt", true);
    if (raw.status == 200) {
      *rules = RobotsRules::parse(raw.body, policy_.user_agent);
    }
  } catch (const FetchError&) {
    // Unreachable robots.txt means no restrictions.
  }
  std::lock_guard lock(robots_mutex_);
  auto [it, inserted] = robots_.emplace(origin, std::move(rules));
  return *it->second;
}

PageDocument HttpPageFetcher::fetch(const std::string& url) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<1024>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};

  std::string current = url;
  for (int redirects = 0;; ++redirects) {
    const auto parsed = parse_http_url(current);
    if (!parsed) {
      throw FetchError(FetchError::Kind::kTransportFailure, "invalid URL: " + current);
    }
    if (policy_.respect_robots && !robots_for(origin_of(*parsed)).allowed(parsed->target)) {
      throw FetchError(FetchError::Kind::kDisallowedByRobots,
                       "robots.txt disallows " + current);
    }
    limiter_.acquire(parsed->host);
    const RawResponse raw = get(current, false);
    if (raw.status >= 300 && raw.status < 400 && !raw.location.empty()) {
      if (redirects >= policy_.max_redirects) {
        throw FetchError(FetchError::Kind::kTooManyRedirects,
                         "more than " + std::to_string(policy_.max_redirects) +
                             " redirects from " + url);
      }
      current = resolve_location(*parsed, raw.location);
      continue;
    }
    if (raw.status < 200 || raw.status >= 300) {
      throw FetchError(FetchError::Kind::kTransportFailure,
                       "HTTP " + std::to_string(raw.status) + " for " + current);
    }
    if (!acceptable_type(raw.content_type)) {
      throw FetchError(FetchError::Kind::kNonHtmlContent,
                       "unsupported content type '" + raw.content_type + "' for " + current);
    }
    return build_document(url, raw.content_type, raw.body, policy_.max_body_bytes,
                          now_seconds());
  }
}

PageDocument fetch_page(const std::string& url, const FetchPolicy& policy) {
  HttpPageFetcher fetcher(policy);
  return fetcher.fetch(url);
}

}  // namespace censorsearch
