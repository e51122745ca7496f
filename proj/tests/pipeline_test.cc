#include <gtest/gtest.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "censorsearch/net/url.h"
#include "censorsearch/pipeline/pipeline.h"
#include "support/fixture_world.h"

namespace censorsearch {
namespace {

using ::censorsearch::testing::blockrate_world;
using ::censorsearch::testing::fanout_world;
using ::censorsearch::testing::graph_world;
using ::censorsearch::testing::reachable_censored_hosts;
using ::censorsearch::testing::seed_world;

// Answers from a fixed censored set and records every host it is asked about.
class FakeProber : public HostProber {
 public:
  explicit FakeProber(std::set<std::string> censored) : censored_(std::move(censored)) {}
  std::vector<dns::ProbeOutcome> probe(const std::vector<std::string>& hosts) override {
    std::vector<dns::ProbeOutcome> out;
    for (const auto& h : hosts) {
      probed.push_back(h);
      const bool hit = censored_.contains(h);
      out.push_back({h, hit ? dns::Verdict::kCensored : dns::Verdict::kNotCensored,
                     hit ? 1u : 0u, 1u, {}});
    }
    return out;
  }
  std::vector<std::string> probed;

 private:
  std::set<std::string> censored_;
};

// In-memory wiring of a world with a fake prober.
struct Rig {
  explicit Rig(const sim::World& w)
      : world(w), prober(w.censored_hosts), dictionary(w.dictionary), segmenter(dictionary),
        corpus(w.corpus_size) {
    for (const auto& [url, entry] : w.pages) pages.add(url, entry);
    for (const auto& [q, urls] : w.search_results) backend.set_results(q, urls);
    for (const auto& [surface, df] : w.document_frequencies) corpus.set(surface, df);
  }

  Pipeline pipeline(RunConfig config = {}) {
    if (config.seed_urls.empty()) config.seed_urls = world.seeds;
    config.logical_clock = true;
    return Pipeline(config, {pages, search, prober, segmenter, corpus});
  }

  sim::World world;
  FakeProber prober;
  SegmenterDictionary dictionary;
  ForwardMaxMatchSegmenter segmenter;
  LocalCorpus corpus;
  FixturePageSource pages;
  MockSearchBackend backend;
  SearchClient search{backend};
};

class PipelineTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { spdlog::set_level(spdlog::level::off); }

  static RunConfig config(std::uint64_t budget = 1'000'000, std::size_t k = 5) {
    RunConfig c;
    c.url_budget = budget;
    c.queries_per_page = k;
    return c;
  }

  static std::string blocklist_text(const RunState& s) {
    std::ostringstream out;
    write_blocklist(out, s.blocklist);
    return out.str();
  }
};

TEST_F(PipelineTest, BootstrapKeepsOnlyCensoredSeeds) {
  Rig rig(seed_world(5, 3));
  const auto state = rig.pipeline().bootstrap();
  EXPECT_EQ(state.frontier.size(), 3u);
  EXPECT_EQ(state.seen_urls.size(), 5u);
  EXPECT_EQ(state.seed_urls.size(), 5u);
  EXPECT_EQ(state.url_counter, 0u);
  EXPECT_TRUE(state.blocklist.empty());
  EXPECT_EQ(state.host_verdicts.size(), 5u);
  EXPECT_NO_THROW(state.check_invariants(1));
}

TEST_F(PipelineTest, BootstrapWithoutCensoredSeedsFails) {
  Rig rig(seed_world(4, 0));
  EXPECT_THROW(rig.pipeline().bootstrap(), EmptyFrontier);
  Rig none(seed_world(0, 0));
  EXPECT_THROW(none.pipeline().bootstrap(), std::invalid_argument);
}

TEST_F(PipelineTest, BootstrapSkipsMalformedAndDuplicateSeeds) {
  Rig rig(seed_world(2, 2));
  RunConfig c = config();
  c.seed_urls = {rig.world.seeds[0], "not a url", rig.world.seeds[0], rig.world.seeds[1]};
  const auto state = rig.pipeline(c).bootstrap();
  EXPECT_EQ(state.frontier.size(), 2u);
  EXPECT_EQ(state.seen_urls.size(), 2u);
}

TEST_F(PipelineTest, ConfigValidation) {
  RunConfig c;
  c.url_budget = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.results_per_query = 51;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.queries_per_page = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST_F(PipelineTest, BudgetIsAHardCap) {
  // Three phrases of 40 results each would surface 120 URLs.
  Rig rig(fanout_world(3, 40, 2).world);
  auto pipeline = rig.pipeline(config(100));
  auto state = pipeline.bootstrap();
  pipeline.step(state);
  EXPECT_EQ(state.url_counter, 100u);
  EXPECT_TRUE(pipeline.finished(state));
  EXPECT_NO_THROW(state.check_invariants(100));
  EXPECT_EQ(state.seen_urls.size() - state.seed_urls.size(), 100u);
  // The third phrase was started but cut short.
  EXPECT_EQ(rig.backend.call_count(), 3u);
}

TEST_F(PipelineTest, BudgetOfOneTakesTheFirstResult) {
  Rig rig(fanout_world(2, 5, 1).world);
  const auto state = rig.pipeline(config(1)).run();
  EXPECT_EQ(state.url_counter, 1u);
  ASSERT_EQ(rig.backend.queries_seen().size(), 1u);
  const std::string first_query = rig.backend.queries_seen()[0];
  const std::set<std::string> expected_seen = {rig.world.seeds[0],
                                               rig.world.search_results.at(first_query)[0]};
  EXPECT_EQ(state.seen_urls, expected_seen);
}

TEST_F(PipelineTest, VerdictsAreCachedPerHost) {
  sim::World w;
  w.seeds = {"http://seed.test/"};
  w.censored_hosts = {"seed.test", "c.test"};
  w.pages = {{"http://seed.test/", {"text/html", "<p>alpha</p>"}},
             {"http://c.test/1", {"text/html", "<p>beta</p>"}}};
  w.search_results = {{"alpha", {"http://c.test/1", "http://c.test/2", "http://seed.test/x"}},
                      {"beta", {"http://c.test/3"}}};
  Rig rig(w);
  const auto state = rig.pipeline(config()).run();
  EXPECT_EQ(rig.prober.probed, (std::vector<std::string>{"seed.test", "c.test"}));
  EXPECT_EQ(state.url_counter, 4u);
  ASSERT_EQ(state.blocklist.size(), 1u);
  EXPECT_EQ(state.blocklist[0].host, "c.test");
  EXPECT_EQ(state.blocklist[0].discovered_via_phrase, "alpha");
  EXPECT_EQ(state.blocklist[0].source_result_url, "http://c.test/1");
  EXPECT_EQ(state.discovery_log, (std::vector<DiscoveryEvent>{{1, "c.test"}}));
}

TEST_F(PipelineTest, PhraseStatsCountHosts) {
  Rig rig(blockrate_world("王岐山", 50, 37));
  const auto state = rig.pipeline(config()).run();
  const auto& stats = state.phrase_stats.at(Phrase::from_surface("王岐山"));
  EXPECT_EQ(stats.results_returned, 50u);
  EXPECT_EQ(stats.unique_hosts, 50u);
  EXPECT_EQ(stats.censored_hosts, 37u);
  EXPECT_EQ(state.blocklist.size(), 37u);
}

TEST_F(PipelineTest, SearchFailuresAreIsolated) {
  Rig rig(fanout_world(3, 4, 1).world);
  rig.backend.push_failure(BackendError::Kind::kQuotaExhausted);
  const auto state = rig.pipeline(config()).run();
  EXPECT_EQ(state.used_phrases.size(), 3u);
  EXPECT_EQ(state.url_counter, 8u);
  EXPECT_EQ(state.phrase_stats.size(), 3u);
  std::size_t empty = 0;
  for (const auto& [p, s] : state.phrase_stats) empty += s.results_returned == 0;
  EXPECT_EQ(empty, 1u);
}

TEST_F(PipelineTest, UnfetchablePagesStillYieldHosts) {
  // fanout_world serves no result pages at all.
  Rig rig(fanout_world(1, 6, 1).world);
  const auto state = rig.pipeline(config()).run();
  EXPECT_EQ(state.blocklist.size(), 6u);
  EXPECT_EQ(state.pages_processed, 1u);
}

TEST_F(PipelineTest, GraphWorldMatchesOracle) {
  const auto linked = graph_world();
  Rig rig(linked.world);
  const auto state = rig.pipeline(config()).run();
  std::set<std::string> found;
  for (const auto& e : state.blocklist) found.insert(e.host);
  const auto oracle = reachable_censored_hosts(linked, ExclusionList::defaults());
  EXPECT_EQ(oracle.size(), 12u);
  EXPECT_EQ(found, oracle);
  EXPECT_NO_THROW(state.check_invariants(1'000'000));
  for (const auto& e : state.blocklist) {
    EXPECT_FALSE(ExclusionList::defaults().excludes(e.host));
    EXPECT_FALSE(state.seed_hosts.contains(e.host));
  }
  for (std::size_t i = 1; i < state.discovery_log.size(); ++i) {
    EXPECT_LE(state.discovery_log[i - 1].url_counter, state.discovery_log[i].url_counter);
  }
}

TEST_F(PipelineTest, RunsAreReproducible) {
  const auto linked = graph_world();
  Rig a(linked.world);
  Rig b(linked.world);
  const auto first = a.pipeline(config()).run();
  const auto second = b.pipeline(config()).run();
  EXPECT_EQ(blocklist_text(first), blocklist_text(second));
  EXPECT_EQ(serialize_state(first), serialize_state(second));
}

TEST_F(PipelineTest, ResumeMidRunMatchesUninterrupted) {
  const auto linked = graph_world();
  Rig straight(linked.world);
  const auto expected = straight.pipeline(config()).run();

  const auto path = std::filesystem::temp_directory_path() / "censorsearch_mid.snapshot";
  Rig first(linked.world);
  auto p1 = first.pipeline(config());
  auto state = p1.bootstrap();
  for (int i = 0; i < 4; ++i) p1.step(state);
  checkpoint(state, path);

  Rig second(linked.world);
  auto p2 = second.pipeline(config());
  auto resumed = resume(path);
  EXPECT_EQ(resumed, state);
  p2.run_from(resumed);
  EXPECT_EQ(blocklist_text(resumed), blocklist_text(expected));
  EXPECT_EQ(resumed, expected);
  std::filesystem::remove(path);
}

TEST_F(PipelineTest, InvariantCheckerCatchesViolations) {
  RunState s;
  s.url_counter = 2;
  EXPECT_THROW(s.check_invariants(1), std::logic_error);
  s = {};
  s.blocklist.push_back({"ghost.test", {}, "p", "http://ghost.test/", NgramMode::kUnigram});
  s.discovery_log.push_back({0, "ghost.test"});
  EXPECT_THROW(s.check_invariants(10), std::logic_error);
}

class SnapshotTest : public PipelineTest {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() / "censorsearch_snapshot_test";
    std::filesystem::remove_all(dir_);
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  static std::string read(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }

  std::filesystem::path dir_;
};

TEST_F(SnapshotTest, RoundTripsFullState) {
  Rig rig(graph_world().world);
  auto pipeline = rig.pipeline(config());
  auto state = pipeline.bootstrap();
  pipeline.step(state);
  const auto path = dir_ / "s.snapshot";
  checkpoint(state, path);
  EXPECT_EQ(resume(path), state);
  EXPECT_FALSE(std::filesystem::exists(dir_ / "s.snapshot.tmp"));
}

TEST_F(SnapshotTest, EmptyBootstrapStateRoundTrips) {
  Rig rig(seed_world(3, 1));
  const auto state = rig.pipeline(config()).bootstrap();
  checkpoint(state, dir_ / "boot.snapshot");
  EXPECT_EQ(resume(dir_ / "boot.snapshot"), state);
  const RunState blank;
  EXPECT_EQ(deserialize_state(serialize_state(blank)), blank);
}

TEST_F(SnapshotTest, TruncationAndTamperingDetected) {
  Rig rig(seed_world(3, 2));
  const auto text = serialize_state(rig.pipeline(config()).bootstrap());
  EXPECT_THROW(deserialize_state(text.substr(0, text.size() / 2)), CorruptSnapshot);
  EXPECT_THROW(deserialize_state(text.substr(0, 10)), CorruptSnapshot);
  EXPECT_THROW(deserialize_state(""), CorruptSnapshot);
  auto flipped = text;
  flipped[flipped.size() - 5] ^= 0x01;
  EXPECT_THROW(deserialize_state(flipped), CorruptSnapshot);
  EXPECT_THROW(deserialize_state("other-format 1 abc\n{}"), CorruptSnapshot);
  EXPECT_THROW(resume(dir_ / "missing.snapshot"), CorruptSnapshot);

  std::ofstream(dir_ / "cut.snapshot", std::ios::binary) << text.substr(0, text.size() - 1);
  EXPECT_THROW(resume(dir_ / "cut.snapshot"), CorruptSnapshot);
}

TEST_F(SnapshotTest, CheckpointReplacesAtomically) {
  const auto path = dir_ / "r.snapshot";
  RunState a;
  a.url_counter = 0;
  checkpoint(a, path);
  RunState b;
  b.pages_processed = 9;
  checkpoint(b, path);
  EXPECT_EQ(resume(path), b);
  EXPECT_EQ(read(path).rfind("censorsearch-snapshot 1 ", 0), 0u);
}

TEST(BlocklistTsvTest, RoundTrip) {
  const std::vector<BlocklistEntry> entries = {
      {"a.test", Timestamp{std::chrono::seconds{1510358400}}, "特首", "http://a.test/1",
       NgramMode::kUnigram},
      {"b.test", Timestamp{std::chrono::seconds{1510358460}}, "human rights",
       "https://b.test/x?y=1", NgramMode::kBigram}};
  std::stringstream buf;
  write_blocklist(buf, entries);
  EXPECT_EQ(buf.str().substr(0, buf.str().find('\n')),
            "a.test\t2017-11-11T00:00:00Z\t特首\thttp://a.test/1\tunigram");
  EXPECT_EQ(read_blocklist(buf), entries);
  std::istringstream bad("a.test\tnot-a-time\tp\tu\tunigram\n");
  EXPECT_THROW(read_blocklist(bad), std::invalid_argument);
}

}  // namespace
}  // namespace censorsearch
