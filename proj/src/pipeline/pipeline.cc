#include "censorsearch/pipeline/pipeline.h"

#include <spdlog/spdlog.h>

#include <set>
#include <utility>

#include "censorsearch/net/url.h"
#include "censorsearch/phrase/ngram.h"
#include "censorsearch/ranking/tfidf.h"
#include "censorsearch/text/utf8.h"
#include "censorsearch/util/parallel.h"

namespace censorsearch {

std::vector<dns::ProbeOutcome> DnsHostProber::probe(const std::vector<std::string>& hosts) {
  return prober_.probe_hosts(hosts, targets_);
}

Pipeline::Pipeline(RunConfig config, PipelineDeps deps)
    : config_(std::move(config)), deps_(deps) {
  config_.validate();
}

Timestamp Pipeline::stamp(std::uint64_t url_counter) const {
  if (config_.logical_clock) {
    return config_.logical_epoch + std::chrono::seconds(static_cast<long long>(url_counter));
  }
  return now_seconds();
}

std::vector<PageDocument> Pipeline::fetch_all(const std::vector<std::string>& urls) {
  auto fetched = parallel_map<std::optional<PageDocument>>(
      urls.size(), config_.fetch_in_flight,
      [&](std::size_t i) -> std::optional<PageDocument> {
        try {
          return deps_.pages.fetch(urls[i]);
        } catch (const FetchError& e) {
          spdlog::warn("fetch {} failed: {} ({})", urls[i], to_string(e.kind()), e.what());
          return std::nullopt;
        }
      });
  std::vector<PageDocument> pages;
  for (auto& doc : fetched) {
    if (doc) pages.push_back(std::move(*doc));
  }
  return pages;
}

RunState Pipeline::bootstrap() {
  if (config_.seed_urls.empty()) throw std::invalid_argument("no seed URLs");
  RunState state;
  state.ngram_mode = config_.ngram_mode;

  std::vector<std::string> seeds;
  std::vector<std::string> hosts;
  for (const auto& raw : config_.seed_urls) {
    const std::string url = utf8::sanitize(raw);
    const std::string host = host_of(url);
    if (host.empty()) {
      spdlog::warn("skipping malformed seed URL {}", url);
      continue;
    }
    if (!state.seen_urls.insert(url).second) continue;
    state.seed_urls.insert(url);
    seeds.push_back(url);
    if (state.seed_hosts.insert(host).second) hosts.push_back(host);
  }

  const auto outcomes = deps_.prober.probe(hosts);
  for (std::size_t i = 0; i < hosts.size(); ++i) state.host_verdicts[hosts[i]] = outcomes[i];

  std::vector<std::string> to_fetch;
  for (const auto& url : seeds) {
    if (state.host_verdicts.at(host_of(url)).verdict == dns::Verdict::kCensored) {
      to_fetch.push_back(url);
    }
  }
  for (auto& doc : fetch_all(to_fetch)) state.frontier.push_back(std::move(doc));
  if (state.frontier.empty()) {
    throw EmptyFrontier("no seed page is both censored and fetchable (" +
                        std::to_string(seeds.size()) + " seeds)");
  }
  return state;
}

bool Pipeline::finished(const RunState& state) const {
  return state.frontier.empty() || state.url_counter >= config_.url_budget;
}

void Pipeline::step(RunState& state) {
  if (finished(state)) return;
  const PageDocument page = std::move(state.frontier.front());
  state.frontier.pop_front();
  ++state.pages_processed;

  const auto counts = extract_ngrams(deps_.segmenter.segment(page.body_text), state.ngram_mode);
  if (counts.empty()) return;
  const auto scored = score_phrases(counts, deps_.corpus, config_.idf);
  const auto queries = select_queries(scored, config_.queries_per_page, state.used_phrases);

  for (const auto& phrase : queries) {
    if (state.url_counter >= config_.url_budget) break;
    state.used_phrases.insert(phrase);
    PhraseStats& stats = state.phrase_stats[phrase];

    std::vector<SearchResult> results;
    try {
      results = deps_.search.search(phrase, config_.results_per_query);
    } catch (const BackendError& e) {
      spdlog::warn("search for \"{}\" failed: {}", phrase.surface(), e.what());
      continue;
    }
    stats.results_returned = results.size();

    std::set<std::string> probed;
    for (const auto& [host, outcome] : state.host_verdicts) probed.insert(host);
    const auto fresh = filter_results(results, config_.exclusions, state.seen_urls, probed);

    // Accept in rank order until the budget runs out.
    std::vector<std::pair<SearchResult, std::uint64_t>> accepted;
    for (const auto& r : fresh) {
      if (state.url_counter >= config_.url_budget) break;
      state.seen_urls.insert(r.url);
      ++state.url_counter;
      accepted.emplace_back(r, state.url_counter);
    }

    std::vector<std::string> new_hosts;
    std::set<std::string> queued;
    for (const auto& [r, counter] : accepted) {
      if (!state.host_verdicts.contains(r.host) && queued.insert(r.host).second) {
        new_hosts.push_back(r.host);
      }
    }
    const auto outcomes = deps_.prober.probe(new_hosts);
    std::map<std::string, dns::ProbeOutcome> by_host;
    for (std::size_t i = 0; i < new_hosts.size(); ++i) by_host[new_hosts[i]] = outcomes[i];

    for (const auto& [r, counter] : accepted) {
      const auto it = by_host.find(r.host);
      if (it == by_host.end()) continue;
      const dns::ProbeOutcome outcome = it->second;
      by_host.erase(it);
      state.host_verdicts[r.host] = outcome;
      if (outcome.verdict == dns::Verdict::kCensored && !state.seed_hosts.contains(r.host)) {
        state.blocklist.push_back(
            {r.host, stamp(counter), phrase.surface(), r.url, state.ngram_mode});
        state.discovery_log.push_back({counter, r.host});
      }
    }

    // Host tallies cover every non-excluded result that has been handled,
    // including URLs seen earlier in the run.
    std::set<std::string> hosts;
    std::set<std::string> censored;
    for (const auto& r : results) {
      if (config_.exclusions.excludes(r.host) || !state.seen_urls.contains(r.url)) continue;
      hosts.insert(r.host);
      const auto v = state.host_verdicts.find(r.host);
      if (v != state.host_verdicts.end() && v->second.verdict == dns::Verdict::kCensored) {
        censored.insert(r.host);
      }
    }
    stats.unique_hosts = hosts.size();
    stats.censored_hosts = censored.size();

    std::vector<std::string> to_fetch;
    for (const auto& [r, counter] : accepted) {
      if (state.host_verdicts.at(r.host).verdict == dns::Verdict::kCensored) {
        to_fetch.push_back(r.url);
      }
    }
    for (auto& doc : fetch_all(to_fetch)) state.frontier.push_back(std::move(doc));
  }
}

void Pipeline::run_from(RunState& state,
                        const std::function<void(const RunState&)>& after_step) {
  while (!finished(state)) {
    step(state);
    if (after_step) after_step(state);
  }
}

RunState Pipeline::run() {
  RunState state = bootstrap();
  run_from(state);
  return state;
}

}  // namespace censorsearch
