// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails or overruns its time limit.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "censorsearch/dns/codec.h"
#include "censorsearch/dns/prober.h"
#include "censorsearch/dns/simulated_censor.h"
#include "censorsearch/phrase/ngram.h"
#include "censorsearch/pipeline/pipeline.h"
#include "censorsearch/ranking/corpus.h"
#include "censorsearch/ranking/tfidf.h"
#include "censorsearch/report/report.h"
#include "censorsearch/sim/world.h"
#include "support/fixture_world.h"

namespace cs = censorsearch;
namespace dns = censorsearch::dns;

namespace {

// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ |= !ok;
  }
  bool failed() const { return failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
};

struct Criterion {
  std::string name;
  std::chrono::duration<double> limit;
  std::function<void(Check&)> body;
};

std::string blocklist_text(const cs::RunState& s) {
  std::ostringstream out;
  cs::write_blocklist(out, s.blocklist);
  return out.str();
}

std::set<std::string> blocklist_hosts(const cs::RunState& s) {
  std::set<std::string> hosts;
  for (const auto& e : s.blocklist) hosts.insert(e.host);
  return hosts;
}

// Probe evidence records censor ports and round-trip times, which differ
// between harnesses; everything else in a run must be reproducible.
cs::RunState without_evidence(cs::RunState s) {
  for (auto& [host, outcome] : s.host_verdicts) outcome = {host, outcome.verdict, 0, 0, {}};
  return s;
}

cs::RunConfig config(std::uint64_t budget, std::size_t k) {
  cs::RunConfig c;
  c.url_budget = budget;
  c.queries_per_page = k;
  c.logical_clock = true;
  return c;
}

// 1. DNS codec.
void codec(Check& check) {
  const dns::Bytes expected = {0x12, 0x34, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00,
                               0x00, 0x00, 0x07, 'e',  'x',  'a',  'm',  'p',  'l',  'e',
                               0x03, 'c',  'o',  'm',  0x00, 0x00, 0x01, 0x00, 0x01};
  check.expect(dns::encode_query({"example.com", dns::kTypeA, dns::kClassIn, 0x1234}) == expected,
               "example.com query bytes");

  std::mt19937 rng(2024);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-";
  for (int i = 0; i < 1000; ++i) {
    std::string name;
    const int labels = 1 + static_cast<int>(rng() % 5);
    for (int l = 0; l < labels; ++l) {
      if (l) name += '.';
      const int len = 1 + static_cast<int>(rng() % 40);
      for (int c = 0; c < len; ++c) name += alphabet[rng() % alphabet.size()];
    }
    const dns::DnsQuestion q{name, dns::kTypeA, dns::kClassIn,
                             static_cast<std::uint16_t>(rng() & 0xffff)};
    const auto wire = dns::encode_query(q);
    check.expect(dns::decode_query(wire) == q, "query round trip: " + name);
    const dns::Ipv4 ip = {static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng()),
                          static_cast<std::uint8_t>(rng()), static_cast<std::uint8_t>(rng())};
    const auto decoded = dns::decode_response(dns::encode_response(q, {ip}), q);
    check.expect(decoded.kind == dns::ResponseKind::kMatching &&
                     decoded.response.answers == std::vector<std::string>{dns::format_ipv4(ip)},
                 "response round trip: " + name);
  }
}

// 2. Verdict over every datagram stream of length <= 4.
void verdict_streams(Check& check) {
  const dns::DnsQuestion q{"probe.test", dns::kTypeA, dns::kClassIn, 0x5151};
  auto echo = dns::encode_query(q);
  echo[2] |= 0x80;  // the query itself with QR set, no answers
  const std::vector<std::pair<dns::Bytes, bool>> kinds = {
      {dns::encode_response(q, {{203, 0, 113, 7}}), true},
      {echo, true},
      {dns::encode_response({"probe.test", 1, 1, 0x5152}, {{1, 2, 3, 4}}), false},
      {dns::encode_response({"decoy.probe.test", 1, 1, 0x5151}, {{1, 2, 3, 4}}), false},
      {dns::encode_response({"probe.test", 28, 1, 0x5151}, {}), false},
      {dns::encode_query(q), false},
      {dns::Bytes{0x51, 0x51, 0x80}, false},
  };
  std::size_t streams = 0;
  std::vector<std::size_t> idx;
  const std::function<void()> walk = [&] {
    std::vector<dns::Bytes> stream;
    bool any = false;
    for (const auto i : idx) {
      stream.push_back(kinds[i].first);
      any |= kinds[i].second;
    }
    ++streams;
    const auto v = dns::judge_stream(stream, q);
    check.expect(v == (any ? dns::Verdict::kCensored : dns::Verdict::kNotCensored),
                 "stream of " + std::to_string(idx.size()));
    if (idx.size() == 4) return;
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      idx.push_back(k);
      walk();
      idx.pop_back();
    }
  };
  walk();
  check.expect(streams == 1 + 7 + 49 + 343 + 2401, "stream enumeration count");
  for (const auto& [bytes, hit] : kinds) {
    check.expect(dns::is_injected_response(bytes, q) == hit, "single datagram classification");
  }
}

// 3. Probing a local injector.
void injector(Check& check) {
  std::set<std::string> censored;
  for (int i = 0; i < 20; ++i) censored.insert("blocked" + std::to_string(i) + ".sim.test");
  dns::SimulatedCensor::Options o;
  o.censored_hosts = censored;
  o.emit_noise = true;
  dns::SimulatedCensor censor(o);
  dns::ProbeSettings settings;
  settings.trials = 2;
  settings.wait = std::chrono::milliseconds(300);
  settings.validation_trials = 1;
  dns::DnsProber prober(settings);
  auto target = censor.target();
  check.expect(prober.validate_target(target, "control.invalid"), "target validates");
  const std::vector<dns::ProbeTarget> targets = {target};

  std::vector<std::string> hosts(censored.begin(), censored.end());
  for (int i = 0; i < 100; ++i) hosts.push_back("open" + std::to_string(i) + ".sim.test");
  const auto outcomes = prober.probe_hosts(hosts, targets);
  check.expect(outcomes.size() == hosts.size(), "one outcome per host");
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto want =
        censored.contains(hosts[i]) ? dns::Verdict::kCensored : dns::Verdict::kNotCensored;
    check.expect(outcomes[i].host == hosts[i] && outcomes[i].verdict == want,
                 hosts[i] + " -> " + std::string(dns::to_string(outcomes[i].verdict)));
  }
  check.expect(prober.decode_errors() == 0, "decode errors");
}

// 4. N-gram extraction.
std::map<std::string, std::size_t> surfaces(const cs::PhraseCounts& counts) {
  std::map<std::string, std::size_t> out;
  for (const auto& [p, n] : counts) out[p.surface()] = n;
  return out;
}

void ngrams(Check& check) {
  cs::Sentence s;
  for (const char* w : {"Chinese", "human", "rights", "violation"}) {
    s.push_back({w, cs::Script::kLatin});
  }
  check.expect(surfaces(cs::extract_ngrams({s}, 2)) ==
                   std::map<std::string, std::size_t>{
                       {"Chinese human", 1}, {"human rights", 1}, {"rights violation", 1}},
               "bigram example");
  check.expect(surfaces(cs::extract_ngrams({s}, 3)) ==
                   std::map<std::string, std::size_t>{{"Chinese human rights", 1},
                                                      {"human rights violation", 1}},
               "trigram example");

  const std::vector<std::string> vocab = {"特首", "自由", "亚洲", "电台", "news", "radio", "42"};
  std::mt19937 rng(404);
  for (int i = 0; i < 100; ++i) {
    std::vector<cs::Sentence> sentences(1 + rng() % 3);
    for (auto& sentence : sentences) {
      for (std::size_t n = rng() % 12; n > 0; --n) {
        const auto& w = vocab[rng() % vocab.size()];
        sentence.push_back({w, cs::classify_script(w)});
      }
    }
    for (std::size_t n = 1; n <= 3; ++n) {
      std::map<std::string, std::size_t> oracle;
      for (const auto& sentence : sentences) {
        for (std::size_t start = 0; start + n <= sentence.size(); ++start) {
          std::string surface;
          bool numeric = false;
          for (std::size_t k = start; k < start + n; ++k) {
            numeric |= sentence[k].text == "42";
            surface += (k == start ? "" : " ") + sentence[k].text;
          }
          if (!numeric) ++oracle[surface];
        }
      }
      check.expect(surfaces(cs::extract_ngrams(sentences, n)) == oracle,
                   "random sequence " + std::to_string(i) + " n=" + std::to_string(n));
    }
  }
}

// 5. TF-IDF scoring.
void tfidf(Check& check) {
  cs::LocalCorpus big(999);
  cs::PhraseCounts five;
  five[cs::Phrase::from_surface("radio")] = 5;
  const auto unseen = cs::score_phrases(five, big);
  check.expect(std::abs(unseen.at(0).score - 39.5388) < 1e-4, "df=0 score");
  big.set("radio", 999);
  check.expect(std::abs(cs::score_phrases(five, big).at(0).score - 5.0) < 1e-12, "df=N score");

  const std::vector<std::string> vocab = {"ab", "cd", "ef", "gh", "ij", "kl", "mn", "op"};
  std::mt19937 rng(77);
  const std::size_t docs = 100;
  std::vector<std::vector<std::string>> words(docs);
  std::vector<std::vector<cs::Sentence>> sentences(docs);
  for (std::size_t d = 0; d < docs; ++d) {
    cs::Sentence s;
    for (std::size_t n = 1 + rng() % 20; n > 0; --n) {
      const auto& w = vocab[rng() % vocab.size()];
      words[d].push_back(w);
      s.push_back({w, cs::Script::kLatin});
    }
    sentences[d] = {s};
  }
  const auto corpus = cs::LocalCorpus::from_documents(sentences);
  for (std::size_t d = 0; d < docs; ++d) {
    std::map<std::string, double> expected;
    for (const auto& w : words[d]) {
      if (expected.contains(w)) continue;
      const auto tf = std::count(words[d].begin(), words[d].end(), w);
      const auto df = std::count_if(words.begin(), words.end(), [&](const auto& doc) {
        return std::find(doc.begin(), doc.end(), w) != doc.end();
      });
      expected[w] = static_cast<double>(tf) * (std::log((docs + 1.0) / (df + 1.0)) + 1.0);
    }
    const auto scored = cs::score_phrases(cs::extract_ngrams(sentences[d], 1), corpus);
    check.expect(scored.size() == expected.size(), "phrase count");
    for (std::size_t i = 0; i < scored.size(); ++i) {
      const auto& sp = scored[i];
      const auto it = expected.find(sp.phrase.surface());
      check.expect(it != expected.end() && std::abs(sp.score - it->second) <= 1e-9 * it->second,
                   "score of " + sp.phrase.surface());
      if (i > 0) check.expect(scored[i - 1].score >= sp.score, "descending order");
    }
  }
}

// 6. Pipeline over the linked graph world.
void graph(Check& check) {
  const auto linked = censorsearch::testing::graph_world();
  const auto oracle =
      censorsearch::testing::reachable_censored_hosts(linked, cs::ExclusionList::defaults());
  check.expect(linked.world.pages.size() == 30 && oracle.size() == 12, "world shape");

  cs::sim::Harness h1(linked.world);
  const auto first = h1.pipeline(config(1'000'000, 5)).run();
  check.expect(blocklist_hosts(first) == oracle, "blocklist equals reachable censored hosts");
  cs::sim::Harness h2(linked.world);
  const auto second = h2.pipeline(config(1'000'000, 5)).run();
  check.expect(blocklist_text(first) == blocklist_text(second), "repeat run byte-identical");
  check.expect(without_evidence(first) == without_evidence(second), "repeat run state");

  const auto path = std::filesystem::temp_directory_path() / "censorsearch_acceptance.snapshot";
  cs::sim::Harness h3(linked.world);
  auto p3 = h3.pipeline(config(1'000'000, 5));
  auto state = p3.bootstrap();
  for (int i = 0; i < 3 && !p3.finished(state); ++i) p3.step(state);
  cs::checkpoint(state, path);
  cs::sim::Harness h4(linked.world);
  auto p4 = h4.pipeline(config(1'000'000, 5));
  auto resumed = cs::resume(path);
  p4.run_from(resumed);
  std::filesystem::remove(path);
  check.expect(blocklist_text(resumed) == blocklist_text(first), "resumed run byte-identical");
  check.expect(without_evidence(resumed) == without_evidence(first),
               "resumed state equals uninterrupted state");
}

// 7. URL budget and exclusions.
void budget(Check& check) {
  auto linked = censorsearch::testing::fanout_world(3, 40, 2);
  auto& first = linked.world.search_results.begin()->second;
  first.insert(first.begin(), {"http://www.facebook.com/a", "http://news.blogspot.com/b"});
  linked.world.censored_hosts.insert({"www.facebook.com", "news.blogspot.com"});
  const auto exclusions = cs::ExclusionList::defaults();
  for (const std::uint64_t k : {1, 10, 100}) {
    cs::sim::Harness harness(linked.world);
    const auto state = harness.pipeline(config(k, 10)).run();
    const std::string tag = "k=" + std::to_string(k);
    check.expect(state.url_counter == k, tag + " url_counter");
    check.expect(state.seen_urls.size() - state.seed_urls.size() == k, tag + " seen URLs");
    for (const auto& e : state.blocklist) {
      check.expect(!exclusions.excludes(e.host), tag + " excluded host " + e.host);
    }
    try {
      state.check_invariants(k);
    } catch (const std::exception& e) {
      check.expect(false, tag + " " + e.what());
    }
  }
}

// 8. Report numbers.
void report(Check& check) {
  // Region sizes and how many of each region's hosts are on the reference list.
  struct Region {
    bool u, b, t;
    std::size_t size, in_reference;
  };
  const std::vector<Region> regions = {{true, true, true, 273, 150},  {true, true, false, 224, 49},
                                       {true, false, true, 224, 49},  {false, true, true, 224, 49},
                                       {true, false, false, 308, 62}, {false, true, false, 249, 124},
                                       {false, false, true, 254, 148}};
  cs::ModeRun uni{"unigram", {}}, bi{"bigram", {}}, tri{"trigram", {}};
  cs::ReferenceList ref{"reference", {}};
  std::size_t serial = 0;
  for (const auto& r : regions) {
    for (std::size_t i = 0; i < r.size; ++i, ++serial) {
      const std::string host = "h" + std::to_string(serial) + ".table.test";
      if (r.u) uni.hosts.insert(host);
      if (r.b) bi.hosts.insert(host);
      if (r.t) tri.hosts.insert(host);
      if (i < r.in_reference) ref.hosts.insert(host);
    }
  }
  const auto b = cs::report_mode_breakdown(std::vector<cs::ModeRun>{uni, bi, tri}, {ref});
  check.expect(b.totals == std::vector<std::size_t>{1029, 970, 975}, "per-mode totals");
  check.expect(b.union_total == 1756, "union total");
  check.expect(b.intersections.at({0, 1}) == 497 && b.intersections.at({0, 2}) == 497 &&
                   b.intersections.at({1, 2}) == 497,
               "pairwise overlaps");
  check.expect(b.new_vs_all == std::vector<std::size_t>{719, 598, 579, 1125}, "new hosts");

  check.expect(cs::blockrate_percent(37, 50) == 74, "37 of 50");
  cs::sim::Harness harness(censorsearch::testing::blockrate_world("王岐山", 50, 37));
  const auto state = harness.pipeline(config(1'000'000, 10)).run();
  const auto rows = cs::report_blockrates(state);
  check.expect(rows.size() == 1 && rows[0].phrase == "王岐山" && rows[0].unique_hosts == 50 &&
                   rows[0].censored_hosts == 37 && rows[0].blockrate == 74,
               "pipeline blockrate row");
}

// 9. Bootstrap from seed lists.
void bootstrap(Check& check) {
  for (const auto& [n, m] : std::vector<std::pair<std::size_t, std::size_t>>{
           {5, 3}, {12, 1}, {8, 8}, {20, 7}}) {
    cs::sim::Harness harness(censorsearch::testing::seed_world(n, m));
    const auto state = harness.pipeline(config(1'000'000, 10)).bootstrap();
    const std::string tag = std::to_string(m) + " of " + std::to_string(n);
    check.expect(state.frontier.size() == m, tag + " frontier");
    check.expect(state.url_counter == 0 && state.blocklist.empty(), tag + " clean start");
  }
  cs::sim::Harness none(censorsearch::testing::seed_world(6, 0));
  bool threw = false;
  try {
    none.pipeline(config(1'000'000, 10)).bootstrap();
  } catch (const cs::EmptyFrontier&) {
    threw = true;
  }
  check.expect(threw, "no censored seeds -> EmptyFrontier");
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  using std::chrono::seconds;
  const std::vector<Criterion> criteria = {
      {"dns codec round trip", seconds(1), codec},
      {"verdict over exhaustive datagram streams", seconds(1), verdict_streams},
      {"injector probing", seconds(30), injector},
      {"n-gram extraction", seconds(5), ngrams},
      {"tf-idf scoring", seconds(5), tfidf},
      {"graph world discovery, determinism and resume", seconds(60), graph},
      {"url budget and exclusions", seconds(10), budget},
      {"report figures", seconds(5), report},
      {"seed bootstrap", seconds(10), bootstrap},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    if (took > c.limit) check.expect(false, "over time limit");
    const bool ok = !check.failed();
    failed += !ok;
    std::printf("%s %zu %s (%.2fs / %.0fs)%s%s\n", ok ? "PASS" : "FAIL", i + 1, c.name.c_str(),
                took.count(), c.limit.count(), ok ? "" : ": ", check.summary().c_str());
  }
  return failed == 0 ? 0 : 1;
}
