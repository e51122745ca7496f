#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "censorsearch/pipeline/run_state.h"

namespace censorsearch {

class MissingReferenceFile : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// censored / unique_hosts as a whole percent, halves rounded up.
int blockrate_percent(std::uint64_t censored_hosts, std::uint64_t unique_hosts);

struct BlockrateRow {
  std::string phrase;
  std::optional<std::string> gloss;
  std::uint64_t results_returned = 0;
  std::uint64_t unique_hosts = 0;
  std::uint64_t censored_hosts = 0;
  int blockrate = 0;
};

// One row per phrase with at least one result host, blockrate descending,
// then censored hosts descending, then phrase.
std::vector<BlockrateRow> report_blockrates(
    const RunState& state, const std::map<std::string, std::string>& glosses = {});

// Operator-supplied translations: "phrase<TAB>gloss" per line.
std::map<std::string, std::string> load_glosses(const std::filesystem::path& path);

struct DomainCount {
  std::string host;
  std::uint64_t url_count = 0;
};

// Discovered hosts ranked by how many non-seed URLs the run saw on them.
std::vector<DomainCount> top_domains(const RunState& state);

struct CurvePoint {
  std::uint64_t url_counter = 0;
  std::uint64_t censored_hosts = 0;
};

// Starts at (0, 0), one point per discovery, and ends at the final counter.
std::vector<CurvePoint> discovery_curve(const RunState& state);

// A `rank,domain` popularity list.
class RankList {
 public:
  static RankList parse(std::istream& in);
  static RankList load(const std::filesystem::path& path);  // throws MissingReferenceFile

  // Rank of the longest listed suffix of host, if any.
  std::optional<std::uint64_t> rank_of(std::string_view host) const;
  std::size_t size() const { return ranks_.size(); }
  std::size_t skipped_lines() const { return skipped_; }

 private:
  std::map<std::string, std::uint64_t, std::less<>> ranks_;
  std::size_t skipped_ = 0;
};

struct RankAnnotation {
  std::string host;
  std::optional<std::uint64_t> rank;
};

std::vector<RankAnnotation> annotate_ranks(const std::vector<std::string>& hosts,
                                           const RankList& ranks);

struct RankBucket {
  std::string label;  // e.g. "1-1000", or "beyond list"
  std::size_t count = 0;
};

// Buckets bounded by `edges` (ascending), then a final "beyond list" bucket
// for unranked hosts and hosts ranked past the last edge.
std::vector<RankBucket> rank_histogram(
    const std::vector<RankAnnotation>& annotations,
    const std::vector<std::uint64_t>& edges = {1000, 10000, 100000, 1000000});

struct ReferenceList {
  std::string name;
  std::set<std::string> hosts;
};

// Accepts `rank,domain` lines, blocklist TSV lines or bare hostnames; `#`
// lines are comments. Throws MissingReferenceFile if unreadable.
ReferenceList load_reference_list(const std::filesystem::path& path);

struct ModeRun {
  std::string label;
  std::set<std::string> hosts;
};

struct ModeBreakdown {
  std::vector<std::string> labels;
  std::vector<std::size_t> totals;
  // Pairwise intersections plus, with three or more runs, the intersection of
  // all of them; keyed by run indices in ascending order.
  std::map<std::vector<std::size_t>, std::size_t> intersections;
  std::size_t union_total = 0;
  std::vector<std::string> reference_names;
  // new_vs_reference[run][ref]; the union is the last row.
  std::vector<std::vector<std::size_t>> new_vs_reference;
  // Hosts on no reference list, per run, then the union.
  std::vector<std::size_t> new_vs_all;
};

// Throws std::invalid_argument if `runs` is empty.
ModeBreakdown report_mode_breakdown(const std::vector<ModeRun>& runs,
                                    const std::vector<ReferenceList>& references);
ModeBreakdown report_mode_breakdown(const std::vector<RunState>& states,
                                    const std::vector<ReferenceList>& references);

struct ReportOptions {
  std::optional<std::filesystem::path> rank_list;
  std::vector<std::filesystem::path> references;
  std::optional<std::filesystem::path> glosses;
};

// Writes top_domains.csv, discovery_curve.csv, phrase_blockrates.csv,
// rank_annotation.csv and mode_breakdown.csv into `dir`. Per-run tables
// carry a leading `run` column. Returns the written paths.
std::vector<std::filesystem::path> write_report_bundle(const std::vector<RunState>& states,
                                                       const ReportOptions& options,
                                                       const std::filesystem::path& dir);

}  // namespace censorsearch
