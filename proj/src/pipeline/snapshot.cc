#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "censorsearch/pipeline/pipeline.h"
#include "censorsearch/util/hash.h"

namespace censorsearch {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "censorsearch-snapshot";
constexpr int kVersion = 1;

json outcome_to_json(const dns::ProbeOutcome& o) {
  json evidence = json::array();
  for (const auto& e : o.evidence) {
    evidence.push_back({{"target", e.target},
                        {"txid_matched", e.txid_matched},
                        {"answer_ips", e.answer_ips},
                        {"rtt_ms", e.rtt.count()}});
  }
  return {{"verdict", dns::to_string(o.verdict)},
          {"responses_seen", o.responses_seen},
          {"trials", o.trials},
          {"evidence", evidence}};
}

dns::ProbeOutcome outcome_from_json(const std::string& host, const json& j) {
  dns::ProbeOutcome o;
  o.host = host;
  const auto verdict = dns::parse_verdict(j.at("verdict").get<std::string>());
  if (!verdict) throw CorruptSnapshot("unknown verdict for " + host);
  o.verdict = *verdict;
  o.responses_seen = j.at("responses_seen").get<decltype(o.responses_seen)>();
  o.trials = j.at("trials").get<decltype(o.trials)>();
  for (const auto& e : j.at("evidence")) {
    dns::ProbeEvidence ev;
    ev.target = e.at("target").get<std::string>();
    ev.txid_matched = e.at("txid_matched").get<bool>();
    ev.answer_ips = e.at("answer_ips").get<std::vector<std::string>>();
    ev.rtt = decltype(ev.rtt)(e.at("rtt_ms").get<decltype(ev.rtt.count())>());
    o.evidence.push_back(std::move(ev));
  }
  return o;
}

json to_json(const RunState& s) {
  json frontier = json::array();
  for (const auto& p : s.frontier) {
    frontier.push_back({{"url", p.url},
                        {"host", p.host},
                        {"body_text", p.body_text},
                        {"fetched_at", p.fetched_at.time_since_epoch().count()},
                        {"content_bytes_read", p.content_bytes_read}});
  }
  json verdicts = json::object();
  for (const auto& [host, o] : s.host_verdicts) verdicts[host] = outcome_to_json(o);
  json used = json::array();
  for (const auto& p : s.used_phrases) used.push_back(p.surface());
  json stats = json::object();
  for (const auto& [p, st] : s.phrase_stats) {
    stats[p.surface()] = {{"results_returned", st.results_returned},
                          {"unique_hosts", st.unique_hosts},
                          {"censored_hosts", st.censored_hosts}};
  }
  json blocklist = json::array();
  for (const auto& e : s.blocklist) {
    blocklist.push_back({{"host", e.host},
                         {"first_seen_at", to_iso8601(e.first_seen_at)},
                         {"phrase", e.discovered_via_phrase},
                         {"source_url", e.source_result_url},
                         {"ngram_mode", to_string(e.ngram_mode)}});
  }
  json log = json::array();
  for (const auto& d : s.discovery_log) log.push_back({d.url_counter, d.host});
  return {{"ngram_mode", to_string(s.ngram_mode)},
          {"url_counter", s.url_counter},
          {"pages_processed", s.pages_processed},
          {"frontier", frontier},
          {"seen_urls", s.seen_urls},
          {"seed_urls", s.seed_urls},
          {"seed_hosts", s.seed_hosts},
          {"host_verdicts", verdicts},
          {"used_phrases", used},
          {"phrase_stats", stats},
          {"blocklist", blocklist},
          {"discovery_log", log}};
}

NgramMode mode_from(const json& j) {
  const auto mode = parse_ngram_mode(j.get<std::string>());
  if (!mode) throw CorruptSnapshot("unknown n-gram mode");
  return *mode;
}

RunState from_json(const json& j) {
  RunState s;
  s.ngram_mode = mode_from(j.at("ngram_mode"));
  s.url_counter = j.at("url_counter").get<std::uint64_t>();
  s.pages_processed = j.at("pages_processed").get<std::uint64_t>();
  for (const auto& p : j.at("frontier")) {
    PageDocument doc;
    doc.url = p.at("url").get<std::string>();
    doc.host = p.at("host").get<std::string>();
    doc.body_text = p.at("body_text").get<std::string>();
    doc.fetched_at = Timestamp(std::chrono::seconds(p.at("fetched_at").get<long long>()));
    doc.content_bytes_read = p.at("content_bytes_read").get<std::size_t>();
    s.frontier.push_back(std::move(doc));
  }
  s.seen_urls = j.at("seen_urls").get<std::set<std::string>>();
  s.seed_urls = j.at("seed_urls").get<std::set<std::string>>();
  s.seed_hosts = j.at("seed_hosts").get<std::set<std::string>>();
  for (const auto& [host, o] : j.at("host_verdicts").items()) {
    s.host_verdicts[host] = outcome_from_json(host, o);
  }
  for (const auto& p : j.at("used_phrases")) {
    s.used_phrases.insert(Phrase::from_surface(p.get<std::string>()));
  }
  for (const auto& [surface, st] : j.at("phrase_stats").items()) {
    s.phrase_stats[Phrase::from_surface(surface)] = {
        st.at("results_returned").get<std::uint64_t>(),
        st.at("unique_hosts").get<std::uint64_t>(),
        st.at("censored_hosts").get<std::uint64_t>()};
  }
  for (const auto& e : j.at("blocklist")) {
    const auto seen = parse_iso8601(e.at("first_seen_at").get<std::string>());
    if (!seen) throw CorruptSnapshot("bad timestamp in blocklist");
    s.blocklist.push_back({e.at("host").get<std::string>(), *seen,
                           e.at("phrase").get<std::string>(),
                           e.at("source_url").get<std::string>(), mode_from(e.at("ngram_mode"))});
  }
  for (const auto& d : j.at("discovery_log")) {
    s.discovery_log.push_back({d.at(0).get<std::uint64_t>(), d.at(1).get<std::string>()});
  }
  return s;
}

}  // namespace

std::string serialize_state(const RunState& state) {
  const std::string body = to_json(state).dump(1);
  std::ostringstream out;
  out << kMagic << ' ' << kVersion << ' ' << sha256_hex(body) << '\n' << body;
  return out.str();
}

RunState deserialize_state(std::string_view text) {
  const auto newline = text.find('\n');
  if (newline == std::string_view::npos) throw CorruptSnapshot("missing snapshot header");
  std::istringstream header{std::string(text.substr(0, newline))};
  std::string magic, digest;
  int version = 0;
  if (!(header >> magic >> version >> digest) || magic != kMagic) {
    throw CorruptSnapshot("not a snapshot file");
  }
  if (version != kVersion) {
    throw CorruptSnapshot("unsupported snapshot version " + std::to_string(version));
  }
  const std::string_view body = text.substr(newline + 1);
  if (sha256_hex(body) != digest) throw CorruptSnapshot("snapshot checksum mismatch");
  try {
    return from_json(json::parse(body));
  } catch (const json::exception& e) {
    throw CorruptSnapshot(std::string("malformed snapshot body: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CorruptSnapshot(std::string("malformed snapshot body: ") + e.what());
  }
}

void checkpoint(const RunState& state, const std::filesystem::path& path) {
  const std::string data = serialize_state(state);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunState resume(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorruptSnapshot("cannot open snapshot " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_state(buf.str());
}

}  // namespace censorsearch
