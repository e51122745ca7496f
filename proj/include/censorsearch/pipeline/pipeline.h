#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "censorsearch/dns/prober.h"
#include "censorsearch/page_ingest/page.h"
#include "censorsearch/phrase/segmenter.h"
#include "censorsearch/pipeline/run_state.h"
#include "censorsearch/ranking/corpus.h"
#include "censorsearch/search/search.h"

namespace censorsearch {

// Thrown by bootstrap when no seed page is both censored and fetchable.
class EmptyFrontier : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CorruptSnapshot : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Verdict source for the pipeline. Output order follows `hosts`.
class HostProber {
 public:
  virtual ~HostProber() = default;
  virtual std::vector<dns::ProbeOutcome> probe(const std::vector<std::string>& hosts) = 0;
};

class DnsHostProber : public HostProber {
 public:
  DnsHostProber(dns::DnsProber& prober, std::vector<dns::ProbeTarget> targets)
      : prober_(prober), targets_(std::move(targets)) {}
  std::vector<dns::ProbeOutcome> probe(const std::vector<std::string>& hosts) override;

 private:
  dns::DnsProber& prober_;
  std::vector<dns::ProbeTarget> targets_;
};

struct PipelineDeps {
  PageSource& pages;
  SearchClient& search;
  HostProber& prober;
  const Segmenter& segmenter;
  const CorpusFrequencyProvider& corpus;
};

class Pipeline {
 public:
  // Throws std::invalid_argument on an invalid config.
  Pipeline(RunConfig config, PipelineDeps deps);

  const RunConfig& config() const { return config_; }

  // Records the seeds, probes their hosts and fetches the censored ones into
  // the frontier. Throws EmptyFrontier if that leaves the frontier empty.
  RunState bootstrap();

  // Processes the oldest frontier page: extract, rank, search, probe, fetch.
  // A no-op once finished(state).
  void step(RunState& state);

  bool finished(const RunState& state) const;

  // Steps until finished. `after_step`, if set, runs after every step
  // (checkpointing hooks in here).
  void run_from(RunState& state,
                const std::function<void(const RunState&)>& after_step = {});

  RunState run();

 private:
  Timestamp stamp(std::uint64_t url_counter) const;
  std::vector<PageDocument> fetch_all(const std::vector<std::string>& urls);

  RunConfig config_;
  PipelineDeps deps_;
};

// Snapshot file: a header line "censorsearch-snapshot 1 <sha256 of body>"
// followed by a JSON body. Writes go through a temp file and a rename.
std::string serialize_state(const RunState& state);
RunState deserialize_state(std::string_view text);  // throws CorruptSnapshot
void checkpoint(const RunState& state, const std::filesystem::path& path);
RunState resume(const std::filesystem::path& path);  // throws CorruptSnapshot

// Tab-separated: host, first_seen_at (ISO-8601 UTC), phrase, source URL,
// n-gram mode. One entry per line, discovery order.
void write_blocklist(std::ostream& out, const std::vector<BlocklistEntry>& entries);
std::vector<BlocklistEntry> read_blocklist(std::istream& in);

}  // namespace censorsearch
