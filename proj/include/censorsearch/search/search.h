#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <semaphore>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "censorsearch/phrase/ngram.h"

namespace censorsearch {

inline constexpr std::size_t kDefaultResultsPerQuery = 50;

struct SearchResult {
  std::string url;
  std::string host;
  std::size_t rank = 0;  // 1-based position on the result page
  std::string query;
  // The host already has a verdict; the URL still counts toward the budget.
  bool probe_skippable = false;

  bool operator==(const SearchResult&) const = default;
};

// Domain suffixes whose results are dropped. Matching is label aligned.
class ExclusionList {
 public:
  ExclusionList() = default;
  explicit ExclusionList(const std::vector<std::string>& suffixes);

  // blogspot.com, facebook.com, twitter.com, youtube.com, tumblr.com
  static ExclusionList defaults();

  void add(std::string_view suffix);
  bool excludes(std::string_view host) const;
  const std::set<std::string>& suffixes() const { return suffixes_; }

 private:
  std::set<std::string> suffixes_;
};

class BackendError : public std::runtime_error {
 public:
  enum class Kind { kHttp, kQuotaExhausted, kMalformedResponse, kRateLimited };

  BackendError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class RateLimited : public BackendError {
 public:
  explicit RateLimited(const std::string& what)
      : BackendError(Kind::kRateLimited, what) {}
};

// One result page per call. Implementations throw BackendError (RateLimited
// for HTTP 429) and return result URLs in backend order.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::vector<std::string> query(const std::string& text, std::size_t limit) = 0;
  virtual std::size_t page_size() const { return kDefaultResultsPerQuery; }
};

struct RetryPolicy {
  int max_retries = 1;
  std::chrono::duration<double> initial_backoff{1.0};
  double multiplier = 2.0;
};

class SearchClient {
 public:
  explicit SearchClient(SearchBackend& backend, RetryPolicy retry = {})
      : backend_(backend), retry_(retry) {}

  // Sends the phrase surface as the query text in a single backend request
  // (plus backoff retries on RateLimited). Unparseable URLs are dropped
  // before ranks are assigned. Throws std::invalid_argument if limit exceeds
  // the backend page size.
  std::vector<SearchResult> search(const Phrase& phrase, std::size_t limit);

 private:
  SearchBackend& backend_;
  RetryPolicy retry_;
};

// Drops excluded hosts, URLs already seen, and repeats within `results`.
// Results on hosts in `probed_hosts` are kept but marked probe_skippable.
std::vector<SearchResult> filter_results(const std::vector<SearchResult>& results,
                                         const ExclusionList& exclusions,
                                         const std::set<std::string>& seen_urls,
                                         const std::set<std::string>& probed_hosts);

// Offline backend. Fixture directory layout: one JSON file per query named
// <sha256 hex of the query text>.json holding
//   {"query": "...", "results": ["https://...", ...]}
// or {"query": "...", "error": "rate_limited" | "http" | "quota" | "malformed"}.
// A query with no file returns no results.
class MockSearchBackend : public SearchBackend {
 public:
  MockSearchBackend() = default;
  explicit MockSearchBackend(std::filesystem::path fixture_dir);

  static std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                            std::string_view query);
  static void write_fixture(const std::filesystem::path& dir, std::string_view query,
                            const std::vector<std::string>& urls);

  void set_results(std::string query, std::vector<std::string> urls);
  // Queued failures are thrown by the next calls, oldest first.
  void push_failure(BackendError::Kind kind);

  std::vector<std::string> query(const std::string& text, std::size_t limit) override;
  std::size_t call_count() const { return calls_; }
  std::vector<std::string> queries_seen() const;

 private:
  std::filesystem::path fixture_dir_;
  std::map<std::string, std::vector<std::string>> results_;
  std::deque<BackendError::Kind> failures_;
  mutable std::mutex mutex_;
  std::atomic<std::size_t> calls_{0};
  std::vector<std::string> queries_;
};

// Web-search JSON API client: HTTPS GET with the query text as a URL
// parameter and the key in a request header. Result URLs are read from the
// array at `results_pointer` (a JSON pointer), taking `url_field` from each
// element. Requests are throttled to max_qps with at most max_in_flight
// outstanding.
class LiveSearchBackend : public SearchBackend {
 public:
  struct Options {
    std::string endpoint;
    std::string api_key;
    std::string api_key_header = "Ocp-Apim-Subscription-Key";
    std::string query_param = "q";
    std::string count_param = "count";
    std::map<std::string, std::string> extra_params;  // market, language...
    std::string results_pointer = "/webPages/value";
    std::string url_field = "url";
    double max_qps = 3.0;
    std::size_t max_in_flight = 4;
    std::size_t page_size = kDefaultResultsPerQuery;
    std::chrono::duration<double> timeout{15.0};
  };

  explicit LiveSearchBackend(Options options);
  std::vector<std::string> query(const std::string& text, std::size_t limit) override;
  std::size_t page_size() const override { return options_.page_size; }

 private:
  Options options_;
  std::counting_semaphore<256> in_flight_;
  std::mutex throttle_mutex_;
  std::chrono::steady_clock::time_point next_slot_{};
};

// Parses a result page with the given JSON pointer and field name.
std::vector<std::string> parse_result_urls(std::string_view json_body,
                                           const std::string& results_pointer,
                                           const std::string& url_field);

}  // namespace censorsearch
