#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "censorsearch/dns/prober.h"
#include "censorsearch/page_ingest/page.h"
#include "censorsearch/phrase/ngram.h"
#include "censorsearch/ranking/tfidf.h"
#include "censorsearch/search/search.h"
#include "censorsearch/util/time.h"

namespace censorsearch {

struct BlocklistEntry {
  std::string host;
  Timestamp first_seen_at{};
  std::string discovered_via_phrase;
  std::string source_result_url;
  NgramMode ngram_mode = NgramMode::kUnigram;

  bool operator==(const BlocklistEntry&) const = default;
};

// Outcome of one phrase's single search. Host counts cover the results that
// passed the exclusion filter and were processed (or had been seen before).
struct PhraseStats {
  std::uint64_t results_returned = 0;
  std::uint64_t unique_hosts = 0;
  std::uint64_t censored_hosts = 0;

  bool operator==(const PhraseStats&) const = default;
};

struct DiscoveryEvent {
  std::uint64_t url_counter = 0;
  std::string host;

  bool operator==(const DiscoveryEvent&) const = default;
};

struct RunConfig {
  std::vector<std::string> seed_urls;
  NgramMode ngram_mode = NgramMode::kUnigram;
  std::uint64_t url_budget = 1'000'000;
  std::size_t queries_per_page = 10;
  std::size_t results_per_query = kDefaultResultsPerQuery;
  ExclusionList exclusions = ExclusionList::defaults();
  IdfFormula idf = IdfFormula::kSmoothedLog;
  std::size_t fetch_in_flight = 16;
  // Stamp events with logical_epoch + url_counter seconds instead of the
  // wall clock, which makes simulated runs byte-reproducible.
  bool logical_clock = false;
  Timestamp logical_epoch{std::chrono::seconds{1510358400}};  // 2017-11-11

  // Throws std::invalid_argument.
  void validate() const;
};

struct RunState {
  NgramMode ngram_mode = NgramMode::kUnigram;
  // Censored pages waiting for phrase extraction, oldest first.
  std::deque<PageDocument> frontier;
  // Every URL handled this run, seeds included.
  std::set<std::string> seen_urls;
  std::set<std::string> seed_urls;
  std::set<std::string> seed_hosts;
  // Unique search-result URLs accepted so far; seeds do not count.
  std::uint64_t url_counter = 0;
  std::uint64_t pages_processed = 0;
  std::map<std::string, dns::ProbeOutcome> host_verdicts;
  std::set<Phrase> used_phrases;
  std::map<Phrase, PhraseStats> phrase_stats;
  // Discovery order, unique by host.
  std::vector<BlocklistEntry> blocklist;
  std::vector<DiscoveryEvent> discovery_log;

  bool operator==(const RunState&) const = default;

  // Throws std::logic_error naming the first violated invariant.
  void check_invariants(std::uint64_t url_budget) const;
};

}  // namespace censorsearch
