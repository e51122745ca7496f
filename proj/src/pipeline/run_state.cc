#include "censorsearch/pipeline/run_state.h"

#include <stdexcept>

namespace censorsearch {

void RunConfig::validate() const {
  if (url_budget < 1) throw std::invalid_argument("url_budget must be >= 1");
  if (queries_per_page < 1) throw std::invalid_argument("queries_per_page must be >= 1");
  if (results_per_query < 1 || results_per_query > kDefaultResultsPerQuery) {
    throw std::invalid_argument("results_per_query must be in [1, 50]");
  }
  if (fetch_in_flight < 1) throw std::invalid_argument("fetch_in_flight must be >= 1");
}

void RunState::check_invariants(std::uint64_t url_budget) const {
  if (url_counter > url_budget) throw std::logic_error("url_counter exceeds url_budget");
  for (const auto& s : seed_urls) {
    if (!seen_urls.contains(s)) throw std::logic_error("seed URL missing from seen_urls");
  }
  if (url_counter != seen_urls.size() - seed_urls.size()) {
    throw std::logic_error("url_counter disagrees with non-seed seen URLs");
  }
  std::set<std::string> hosts;
  for (const auto& entry : blocklist) {
    const auto it = host_verdicts.find(entry.host);
    if (it == host_verdicts.end() || it->second.verdict != dns::Verdict::kCensored) {
      throw std::logic_error("blocklist host without Censored verdict: " + entry.host);
    }
    if (!hosts.insert(entry.host).second) {
      throw std::logic_error("duplicate blocklist host: " + entry.host);
    }
    if (seed_hosts.contains(entry.host)) {
      throw std::logic_error("seed host on blocklist: " + entry.host);
    }
  }
  for (std::size_t i = 1; i < discovery_log.size(); ++i) {
    if (discovery_log[i].url_counter < discovery_log[i - 1].url_counter) {
      throw std::logic_error("discovery_log not monotone");
    }
  }
  if (discovery_log.size() != blocklist.size()) {
    throw std::logic_error("discovery_log and blocklist sizes differ");
  }
}

}  // namespace censorsearch
