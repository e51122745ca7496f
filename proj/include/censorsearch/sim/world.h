#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "censorsearch/dns/prober.h"
#include "censorsearch/dns/simulated_censor.h"
#include "censorsearch/page_ingest/page.h"
#include "censorsearch/phrase/segmenter.h"
#include "censorsearch/pipeline/pipeline.h"
#include "censorsearch/ranking/corpus.h"
#include "censorsearch/search/search.h"

namespace censorsearch::sim {

// A closed offline world: pages, a search index and a censored host set.
//
// On disk it is a directory holding world.json and a search/ directory of
// mock-backend fixtures:
//   {"seeds": [url...], "censored_hosts": [host...], "control_host": "...",
//    "pages": [{"url", "content_type", "body"}...], "dictionary": [word...],
//    "corpus": {"size": N, "df": {"phrase": n...}}}
struct World {
  std::vector<std::string> seeds;
  std::set<std::string> censored_hosts;
  std::string control_host = "control.invalid";
  std::vector<std::pair<std::string, FixturePageSource::Entry>> pages;
  std::vector<std::string> dictionary;
  std::uint64_t corpus_size = 1000;
  std::map<std::string, std::uint64_t> document_frequencies;
  // Query surface -> result URLs, served in memory.
  std::map<std::string, std::vector<std::string>> search_results;
  // Fixture directory consulted for queries not in search_results.
  std::optional<std::filesystem::path> search_dir;
};

World load_world(const std::filesystem::path& dir);
// Writes world.json and one search fixture per search_results entry.
void save_world(const World& world, const std::filesystem::path& dir);

// Owns the simulated censors, page source, search backend and ranking inputs
// for one world, and builds pipelines wired to them.
class Harness {
 public:
  struct Options {
    dns::SimulatedCensor::Mode mode = dns::SimulatedCensor::Mode::kInjector;
    bool emit_noise = false;
    std::size_t censor_count = 2;  // independent probe targets
    dns::ProbeSettings probe{.trials = 2,
                             .wait = std::chrono::milliseconds(250),
                             .validation_trials = 1,
                             .max_in_flight = 32};
  };

  explicit Harness(const World& world);
  Harness(const World& world, Options options);
  ~Harness();

  // Seeds default to the world's seeds when the config has none.
  Pipeline pipeline(RunConfig config);

  dns::DnsProber& prober() { return *prober_; }
  const std::vector<dns::ProbeTarget>& targets() const { return targets_; }
  FixturePageSource& pages() { return *pages_; }
  MockSearchBackend& backend() { return *backend_; }
  HostProber& host_prober() { return *host_prober_; }

 private:
  std::vector<std::string> seeds_;
  std::vector<std::unique_ptr<dns::SimulatedCensor>> censors_;
  std::unique_ptr<dns::DnsProber> prober_;
  std::vector<dns::ProbeTarget> targets_;
  std::unique_ptr<DnsHostProber> host_prober_;
  std::unique_ptr<FixturePageSource> pages_;
  std::unique_ptr<MockSearchBackend> backend_;
  std::unique_ptr<SearchClient> search_;
  SegmenterDictionary dictionary_;
  std::unique_ptr<ForwardMaxMatchSegmenter> segmenter_;
  std::unique_ptr<LocalCorpus> corpus_;
};

}  // namespace censorsearch::sim
