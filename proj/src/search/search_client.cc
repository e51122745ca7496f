#include <spdlog/spdlog.h>

#include <thread>

#include "censorsearch/net/url.h"
#include "censorsearch/search/search.h"

namespace censorsearch {

std::vector<SearchResult> SearchClient::search(const Phrase& phrase, std::size_t limit) {
  if (phrase.surface().empty()) throw std::invalid_argument("empty search phrase");
  if (limit > backend_.page_size()) {
    throw std::invalid_argument("limit " + std::to_string(limit) +
                                " exceeds backend page size " +
                                std::to_string(backend_.page_size()));
  }
  std::vector<std::string> urls;
  auto backoff = retry_.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    try {
      urls = backend_.query(phrase.surface(), limit);
      break;
    } catch (const RateLimited& e) {
      if (attempt >= retry_.max_retries) throw;
      spdlog::warn("search for '{}' rate limited; retrying in {:.2f}s", phrase.surface(),
                   backoff.count());
      std::this_thread::sleep_for(backoff);
      backoff *= retry_.multiplier;
    }
  }
  std::vector<SearchResult> results;
  for (const auto& url : urls) {
    if (results.size() >= limit) break;
    auto parsed = parse_http_url(url);
    if (!parsed) continue;
    results.push_back(SearchResult{url, parsed->host, results.size() + 1,
                                   phrase.surface(), false});
  }
  return results;
}

}  // namespace censorsearch
