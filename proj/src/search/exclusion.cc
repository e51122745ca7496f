#include "censorsearch/net/url.h"
#include "censorsearch/search/search.h"

namespace censorsearch {

ExclusionList::ExclusionList(const std::vector<std::string>& suffixes) {
  for (const auto& s : suffixes) add(s);
}

ExclusionList ExclusionList::defaults() {
  return ExclusionList({"blogspot.com", "facebook.com", "twitter.com", "youtube.com",
                        "tumblr.com"});
}

void ExclusionList::add(std::string_view suffix) {
  while (!suffix.empty() && suffix.front() == '.') suffix.remove_prefix(1);
  std::string normalized = normalize_host(suffix);
  if (!normalized.empty()) suffixes_.insert(std::move(normalized));
}

bool ExclusionList::excludes(std::string_view host) const {
  for (const auto& suffix : suffixes_) {
    if (host_matches_suffix(host, suffix)) return true;
  }
  return false;
}

std::vector<SearchResult> filter_results(const std::vector<SearchResult>& results,
                                         const ExclusionList& exclusions,
                                         const std::set<std::string>& seen_urls,
                                         const std::set<std::string>& probed_hosts) {
  std::vector<SearchResult> out;
  std::set<std::string> batch;
  for (const auto& r : results) {
    if (exclusions.excludes(r.host)) continue;
    if (seen_urls.contains(r.url) || !batch.insert(r.url).second) continue;
    SearchResult kept = r;
    kept.probe_skippable = probed_hosts.contains(r.host);
    out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace censorsearch
