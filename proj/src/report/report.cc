#include "censorsearch/report/report.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "censorsearch/net/url.h"
#include "censorsearch/report/csv.h"

namespace censorsearch {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::set<std::string> blocklist_hosts(const RunState& state) {
  std::set<std::string> hosts;
  for (const auto& e : state.blocklist) hosts.insert(e.host);
  return hosts;
}

std::size_t count_new(const std::set<std::string>& hosts, const std::set<std::string>& ref) {
  return static_cast<std::size_t>(std::count_if(
      hosts.begin(), hosts.end(), [&](const std::string& h) { return !ref.contains(h); }));
}

}  // namespace

int blockrate_percent(std::uint64_t censored_hosts, std::uint64_t unique_hosts) {
  if (unique_hosts == 0) return 0;
  return static_cast<int>((200 * censored_hosts + unique_hosts) / (2 * unique_hosts));
}

std::vector<BlockrateRow> report_blockrates(const RunState& state,
                                            const std::map<std::string, std::string>& glosses) {
  std::vector<BlockrateRow> rows;
  for (const auto& [phrase, stats] : state.phrase_stats) {
    if (stats.results_returned == 0 || stats.unique_hosts == 0) continue;
    BlockrateRow row;
    row.phrase = phrase.surface();
    if (const auto it = glosses.find(row.phrase); it != glosses.end()) row.gloss = it->second;
    row.results_returned = stats.results_returned;
    row.unique_hosts = stats.unique_hosts;
    row.censored_hosts = stats.censored_hosts;
    row.blockrate = blockrate_percent(stats.censored_hosts, stats.unique_hosts);
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BlockrateRow& a, const BlockrateRow& b) {
    if (a.blockrate != b.blockrate) return a.blockrate > b.blockrate;
    if (a.censored_hosts != b.censored_hosts) return a.censored_hosts > b.censored_hosts;
    return a.phrase < b.phrase;
  });
  return rows;
}

std::map<std::string, std::string> load_glosses(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingReferenceFile("cannot read gloss file " + path.string());
  std::map<std::string, std::string> glosses;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    glosses[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return glosses;
}

std::vector<DomainCount> top_domains(const RunState& state) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& e : state.blocklist) counts[e.host] = 0;
  for (const auto& url : state.seen_urls) {
    if (state.seed_urls.contains(url)) continue;
    const std::string host = host_of(url);
    if (const auto it = counts.find(host); it != counts.end()) ++it->second;
  }
  std::vector<DomainCount> rows;
  for (const auto& [host, n] : counts) rows.push_back({host, n});
  std::stable_sort(rows.begin(), rows.end(), [](const DomainCount& a, const DomainCount& b) {
    return a.url_count > b.url_count;
  });
  return rows;
}

std::vector<CurvePoint> discovery_curve(const RunState& state) {
  std::vector<CurvePoint> curve{{0, 0}};
  std::uint64_t found = 0;
  for (const auto& d : state.discovery_log) curve.push_back({d.url_counter, ++found});
  if (curve.back().url_counter != state.url_counter) curve.push_back({state.url_counter, found});
  return curve;
}

RankList RankList::parse(std::istream& in) {
  RankList list;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    const auto rank =
        comma == std::string::npos ? std::nullopt : parse_uint(trim(t.substr(0, comma)));
    const std::string domain =
        comma == std::string::npos ? std::string() : normalize_host(trim(t.substr(comma + 1)));
    if (!rank || *rank == 0 || domain.empty() || domain.find(',') != std::string::npos) {
      ++list.skipped_;
      continue;
    }
    const auto [it, inserted] = list.ranks_.emplace(domain, *rank);
    if (!inserted) it->second = std::min(it->second, *rank);
  }
  return list;
}

RankList RankList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingReferenceFile("cannot read rank list " + path.string());
  return parse(in);
}

std::optional<std::uint64_t> RankList::rank_of(std::string_view host) const {
  std::string h = normalize_host(host);
  std::string_view rest = h;
  while (!rest.empty()) {
    if (const auto it = ranks_.find(rest); it != ranks_.end()) return it->second;
    const auto dot = rest.find('.');
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  return std::nullopt;
}

std::vector<RankAnnotation> annotate_ranks(const std::vector<std::string>& hosts,
                                           const RankList& ranks) {
  std::vector<RankAnnotation> out;
  out.reserve(hosts.size());
  for (const auto& h : hosts) out.push_back({h, ranks.rank_of(h)});
  return out;
}

std::vector<RankBucket> rank_histogram(const std::vector<RankAnnotation>& annotations,
                                       const std::vector<std::uint64_t>& edges) {
  std::vector<RankBucket> buckets;
  std::uint64_t lower = 1;
  for (const auto edge : edges) {
    buckets.push_back({std::to_string(lower) + "-" + std::to_string(edge), 0});
    lower = edge + 1;
  }
  buckets.push_back({"beyond list", 0});
  for (const auto& a : annotations) {
    std::size_t i = 0;
    if (a.rank) {
      while (i < edges.size() && *a.rank > edges[i]) ++i;
    } else {
      i = edges.size();
    }
    ++buckets[i].count;
  }
  return buckets;
}

ReferenceList load_reference_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingReferenceFile("cannot read reference list " + path.string());
  ReferenceList ref;
  ref.name = path.filename().string();
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::string field = t.substr(0, t.find('\t'));
    if (const auto comma = field.find(','); comma != std::string::npos) {
      const std::string first = trim(field.substr(0, comma));
      field = parse_uint(first) ? field.substr(comma + 1) : first;
    }
    const std::string host = normalize_host(trim(field));
    if (!host.empty()) ref.hosts.insert(host);
  }
  return ref;
}

ModeBreakdown report_mode_breakdown(const std::vector<ModeRun>& runs,
                                    const std::vector<ReferenceList>& references) {
  if (runs.empty()) throw std::invalid_argument("mode breakdown needs at least one run");
  ModeBreakdown out;
  std::set<std::string> all;
  for (const auto& r : runs) {
    out.labels.push_back(r.label);
    out.totals.push_back(r.hosts.size());
    all.insert(r.hosts.begin(), r.hosts.end());
  }
  out.union_total = all.size();

  const auto intersect = [&](const std::vector<std::size_t>& idx) {
    return static_cast<std::size_t>(
        std::count_if(runs[idx[0]].hosts.begin(), runs[idx[0]].hosts.end(),
                      [&](const std::string& h) {
                        return std::all_of(idx.begin() + 1, idx.end(), [&](std::size_t i) {
                          return runs[i].hosts.contains(h);
                        });
                      }));
  };
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      out.intersections[{i, j}] = intersect({i, j});
    }
  }
  if (runs.size() >= 3) {
    std::vector<std::size_t> idx(runs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    out.intersections[idx] = intersect(idx);
  }

  std::set<std::string> any_ref;
  for (const auto& ref : references) {
    out.reference_names.push_back(ref.name);
    any_ref.insert(ref.hosts.begin(), ref.hosts.end());
  }
  std::vector<const std::set<std::string>*> sets;
  for (const auto& r : runs) sets.push_back(&r.hosts);
  sets.push_back(&all);
  for (const auto* hosts : sets) {
    std::vector<std::size_t> per_ref;
    for (const auto& ref : references) per_ref.push_back(count_new(*hosts, ref.hosts));
    out.new_vs_reference.push_back(std::move(per_ref));
    out.new_vs_all.push_back(count_new(*hosts, any_ref));
  }
  return out;
}

ModeBreakdown report_mode_breakdown(const std::vector<RunState>& states,
                                    const std::vector<ReferenceList>& references) {
  std::vector<ModeRun> runs;
  std::map<std::string, int> seen;
  for (const auto& s : states) {
    std::string label(to_string(s.ngram_mode));
    if (const int n = ++seen[label]; n > 1) label += "#" + std::to_string(n);
    runs.push_back({label, blocklist_hosts(s)});
  }
  return report_mode_breakdown(runs, references);
}

namespace {

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << data;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  return path;
}

std::string run_label(const ModeBreakdown& b, std::size_t i) { return b.labels[i]; }

}  // namespace

std::vector<std::filesystem::path> write_report_bundle(const std::vector<RunState>& states,
                                                       const ReportOptions& options,
                                                       const std::filesystem::path& dir) {
  if (states.empty()) throw std::invalid_argument("no run states to report on");
  std::vector<ReferenceList> references;
  for (const auto& p : options.references) references.push_back(load_reference_list(p));
  const auto glosses =
      options.glosses ? load_glosses(*options.glosses) : std::map<std::string, std::string>{};
  std::optional<RankList> ranks;
  if (options.rank_list) ranks = RankList::load(*options.rank_list);
  const ModeBreakdown breakdown = report_mode_breakdown(states, references);

  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;

  std::ostringstream top, curve, rates, annot;
  csv::write_row(top, {"run", "host", "url_count"});
  csv::write_row(curve, {"run", "url_counter", "censored_hosts"});
  csv::write_row(rates, {"run", "phrase", "gloss", "results_returned", "unique_hosts",
                         "censored_hosts", "blockrate_pct_of_unique_hosts"});
  csv::write_row(annot, {"run", "host", "rank"});
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string run = run_label(breakdown, i);
    for (const auto& d : top_domains(states[i])) {
      csv::write_row(top, {run, d.host, std::to_string(d.url_count)});
    }
    for (const auto& p : discovery_curve(states[i])) {
      csv::write_row(curve, {run, std::to_string(p.url_counter), std::to_string(p.censored_hosts)});
    }
    for (const auto& r : report_blockrates(states[i], glosses)) {
      csv::write_row(rates, {run, r.phrase, r.gloss.value_or(""), std::to_string(r.results_returned),
                             std::to_string(r.unique_hosts), std::to_string(r.censored_hosts),
                             std::to_string(r.blockrate)});
    }
    std::vector<std::string> hosts;
    for (const auto& e : states[i].blocklist) hosts.push_back(e.host);
    for (const auto& a : annotate_ranks(hosts, ranks ? *ranks : RankList{})) {
      csv::write_row(annot, {run, a.host, a.rank ? std::to_string(*a.rank) : ""});
    }
  }
  written.push_back(write_file(dir / "top_domains.csv", top.str()));
  written.push_back(write_file(dir / "discovery_curve.csv", curve.str()));
  written.push_back(write_file(dir / "phrase_blockrates.csv", rates.str()));
  written.push_back(write_file(dir / "rank_annotation.csv", annot.str()));

  std::ostringstream modes;
  csv::write_row(modes, {"metric", "runs", "reference", "count"});
  for (std::size_t i = 0; i < breakdown.labels.size(); ++i) {
    csv::write_row(modes, {"total", breakdown.labels[i], "", std::to_string(breakdown.totals[i])});
  }
  csv::write_row(modes, {"total", "union", "", std::to_string(breakdown.union_total)});
  for (const auto& [idx, n] : breakdown.intersections) {
    std::string runs;
    for (const auto i : idx) runs += (runs.empty() ? "" : "+") + breakdown.labels[i];
    csv::write_row(modes, {"intersection", runs, "", std::to_string(n)});
  }
  for (std::size_t i = 0; i < breakdown.new_vs_all.size(); ++i) {
    const std::string runs = i < breakdown.labels.size() ? breakdown.labels[i] : "union";
    for (std::size_t r = 0; r < breakdown.reference_names.size(); ++r) {
      csv::write_row(modes, {"new", runs, breakdown.reference_names[r],
                             std::to_string(breakdown.new_vs_reference[i][r])});
    }
    csv::write_row(modes, {"new", runs, "all references", std::to_string(breakdown.new_vs_all[i])});
  }
  written.push_back(write_file(dir / "mode_breakdown.csv", modes.str()));
  return written;
}

}  // namespace censorsearch
