#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "censorsearch/search/search.h"
#include "censorsearch/sim/world.h"

namespace censorsearch::testing {

// A world plus the word lists its pages were written from, so oracles can
// reason about reachability without running the segmenter.
struct LinkedWorld {
  sim::World world;
  std::map<std::string, std::vector<std::string>> page_words;  // url -> words
};

// 30 pages on seed, censored, uncensored and excluded hosts. Twelve censored
// hosts are reachable from the seeds through phrase searches; two more sit
// behind pages that are never expanded.
LinkedWorld graph_world();

// Censored hosts reachable from the seeds: breadth-first over
// page -> words -> search results, expanding only pages on censored hosts,
// skipping excluded hosts, minus the seed hosts.
std::set<std::string> reachable_censored_hosts(const LinkedWorld& linked,
                                               const ExclusionList& exclusions);

// One censored seed page with `phrases` words, each returning `per_phrase`
// result URLs on distinct hosts, every `censor_every`-th host censored.
LinkedWorld fanout_world(std::size_t phrases, std::size_t per_phrase, std::size_t censor_every);

// `seed_count` seed pages on distinct hosts, the first `censored` of them
// censored.
sim::World seed_world(std::size_t seed_count, std::size_t censored);

// One censored seed page whose only phrase returns `results` URLs on distinct
// hosts, the first `censored` of which are censored.
sim::World blockrate_world(const std::string& phrase, std::size_t results,
                           std::size_t censored);

}  // namespace censorsearch::testing
