// censorsearch: discover DNS-censored hosts by searching for phrases drawn
// from pages that are already known to be censored.

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "censorsearch/dns/prober.h"
#include "censorsearch/dns/simulated_censor.h"
#include "censorsearch/net/url.h"
#include "censorsearch/page_ingest/page.h"
#include "censorsearch/phrase/ngram.h"
#include "censorsearch/phrase/segmenter.h"
#include "censorsearch/pipeline/pipeline.h"
#include "censorsearch/ranking/corpus.h"
#include "censorsearch/ranking/tfidf.h"
#include "censorsearch/report/report.h"
#include "censorsearch/search/search.h"
#include "censorsearch/sim/world.h"
#include "censorsearch/util/time.h"

namespace cs = censorsearch;

namespace {

// Thrown for bad flag combinations discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string log_level = "warn";

  // Run shape.
  std::string ngram_mode = "unigram";
  std::uint64_t url_budget = 1'000'000;
  std::size_t queries_per_page = 10;
  std::size_t results_per_query = cs::kDefaultResultsPerQuery;
  std::vector<std::string> exclude;
  bool no_default_exclusions = false;
  std::string idf = "smoothed-log";
  bool logical_clock = false;

  // Phrases.
  std::string dictionary;
  std::string corpus;
  std::string corpus_endpoint;
  std::uint64_t corpus_size = 0;
  std::string corpus_cache;

  // Probing.
  std::string targets_file;
  std::vector<std::string> targets;
  std::string control_host = "www.example.org";
  int probe_trials = 3;
  double probe_wait = 2.0;
  std::size_t probe_concurrency = 32;
  std::vector<std::string> simulated_censored;

  // Search.
  std::string search_fixtures;
  std::string search_endpoint;
  std::string search_key_env = "CENSORSEARCH_SEARCH_KEY";
  std::string search_key_header = "Ocp-Apim-Subscription-Key";
  std::string search_results_pointer = "/webPages/value";
  double search_qps = 3.0;

  // Fetching.
  double fetch_timeout = 10.0;
  std::size_t max_body_bytes = 1 << 20;
  int max_redirects = 5;
  std::string user_agent = "censorsearch/1.0";
  double per_host_delay = 1.0;
  std::size_t fetch_concurrency = 16;
  bool ignore_robots = false;
};

cs::NgramMode ngram_mode_of(const Settings& s) {
  const auto mode = cs::parse_ngram_mode(s.ngram_mode);
  if (!mode) throw UsageError("unknown --ngram-mode " + s.ngram_mode);
  return *mode;
}

cs::IdfFormula idf_of(const Settings& s) {
  const auto f = cs::parse_idf_formula(s.idf);
  if (!f) throw UsageError("unknown --idf " + s.idf);
  return *f;
}

cs::ExclusionList exclusions_of(const Settings& s) {
  cs::ExclusionList list = s.no_default_exclusions ? cs::ExclusionList{}
                                                   : cs::ExclusionList::defaults();
  for (const auto& suffix : s.exclude) list.add(suffix);
  return list;
}

cs::FetchPolicy fetch_policy_of(const Settings& s) {
  cs::FetchPolicy p;
  p.timeout = std::chrono::duration<double>(s.fetch_timeout);
  p.max_body_bytes = s.max_body_bytes;
  p.max_redirects = s.max_redirects;
  p.user_agent = s.user_agent;
  p.per_host_delay = std::chrono::duration<double>(s.per_host_delay);
  p.max_in_flight = s.fetch_concurrency;
  p.respect_robots = !s.ignore_robots;
  p.validate();
  return p;
}

cs::SegmenterDictionary dictionary_of(const Settings& s) {
  if (s.dictionary.empty()) return {};
  return cs::SegmenterDictionary::load(s.dictionary);
}

std::unique_ptr<cs::CorpusFrequencyProvider> corpus_of(const Settings& s) {
  if (!s.corpus_endpoint.empty()) {
    if (s.corpus_size == 0) throw UsageError("--corpus-endpoint needs --corpus-size");
    cs::RemoteCorpusClient::Options o;
    o.endpoint = s.corpus_endpoint;
    o.corpus_size = s.corpus_size;
    o.cache_path = s.corpus_cache;
    return std::make_unique<cs::RemoteCorpusClient>(o);
  }
  if (!s.corpus.empty()) {
    auto corpus = cs::LocalCorpus::load(s.corpus);
    if (corpus.skipped_lines() > 0) {
      spdlog::warn("corpus {}: skipped {} malformed lines", s.corpus, corpus.skipped_lines());
    }
    return std::make_unique<cs::LocalCorpus>(std::move(corpus));
  }
  throw UsageError("a phrase corpus is required: --corpus or --corpus-endpoint");
}

std::unique_ptr<cs::SearchBackend> backend_of(const Settings& s) {
  if (!s.search_fixtures.empty()) {
    return std::make_unique<cs::MockSearchBackend>(s.search_fixtures);
  }
  if (s.search_endpoint.empty()) {
    throw UsageError("a search backend is required: --search-endpoint or --search-fixtures");
  }
  const char* key = std::getenv(s.search_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw UsageError("search API key missing: set $" + s.search_key_env);
  }
  cs::LiveSearchBackend::Options o;
  o.endpoint = s.search_endpoint;
  o.api_key = key;
  o.api_key_header = s.search_key_header;
  o.results_pointer = s.search_results_pointer;
  o.max_qps = s.search_qps;
  return std::make_unique<cs::LiveSearchBackend>(o);
}

// Probe targets, either real ones from flags or a local simulated injector.
struct Probing {
  std::vector<std::unique_ptr<cs::dns::SimulatedCensor>> censors;
  std::unique_ptr<cs::dns::DnsProber> prober;
  std::vector<cs::dns::ProbeTarget> targets;
};

Probing probing_of(const Settings& s) {
  Probing p;
  cs::dns::ProbeSettings ps;
  ps.trials = s.probe_trials;
  ps.wait = std::chrono::duration<double>(s.probe_wait);
  ps.max_in_flight = s.probe_concurrency;
  p.prober = std::make_unique<cs::dns::DnsProber>(ps);

  std::vector<cs::dns::ProbeTarget> candidates;
  if (!s.simulated_censored.empty()) {
    cs::dns::SimulatedCensor::Options o;
    o.censored_hosts = {s.simulated_censored.begin(), s.simulated_censored.end()};
    p.censors.push_back(std::make_unique<cs::dns::SimulatedCensor>(o));
    candidates.push_back(p.censors.back()->target());
  }
  if (!s.targets_file.empty()) {
    for (auto& t : cs::dns::load_targets(s.targets_file)) candidates.push_back(t);
  }
  for (const auto& t : s.targets) candidates.push_back(cs::dns::parse_target(t));
  if (candidates.empty()) {
    throw UsageError("no probe targets: use --target, --targets or --simulated-censored");
  }
  for (auto& t : candidates) {
    if (p.prober->validate_target(t, s.control_host)) {
      p.targets.push_back(t);
    } else {
      spdlog::warn("probe target {} answered the control query; dropped", t.endpoint());
    }
  }
  if (p.targets.empty()) throw std::runtime_error("no probe target passed validation");
  return p;
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

void write_blocklist_file(const std::vector<cs::BlocklistEntry>& entries,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  cs::write_blocklist(out, entries);
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string summary_json(const cs::RunState& state) {
  std::size_t censored = 0;
  for (const auto& [host, o] : state.host_verdicts) {
    if (o.verdict == cs::dns::Verdict::kCensored) ++censored;
  }
  return nlohmann::json{{"ngram_mode", cs::to_string(state.ngram_mode)},
                        {"url_counter", state.url_counter},
                        {"pages_processed", state.pages_processed},
                        {"hosts_probed", state.host_verdicts.size()},
                        {"hosts_censored", censored},
                        {"blocklist", state.blocklist.size()},
                        {"frontier", state.frontier.size()}}
      .dump();
}

cs::RunConfig run_config_of(const Settings& s) {
  cs::RunConfig c;
  c.ngram_mode = ngram_mode_of(s);
  c.url_budget = s.url_budget;
  c.queries_per_page = s.queries_per_page;
  c.results_per_query = s.results_per_query;
  c.exclusions = exclusions_of(s);
  c.idf = idf_of(s);
  c.fetch_in_flight = s.fetch_concurrency;
  c.logical_clock = s.logical_clock;
  return c;
}

struct RunArgs {
  std::vector<std::string> seeds;
  std::string seeds_file;
  std::string out_dir = "censorsearch-out";
  std::string resume;
  std::size_t checkpoint_every = 10;
};

// Shared by `run` and `simulate`: bootstrap or resume, then step with
// periodic checkpoints, then write the blocklist and final snapshot.
int drive(cs::Pipeline& pipeline, const RunArgs& args) {
  const std::filesystem::path out = args.out_dir;
  std::filesystem::create_directories(out);
  const auto snapshot = out / "run.snapshot";
  cs::RunState state = args.resume.empty() ? pipeline.bootstrap() : cs::resume(args.resume);
  std::size_t steps = 0;
  pipeline.run_from(state, [&](const cs::RunState& s) {
    if (args.checkpoint_every > 0 && ++steps % args.checkpoint_every == 0) {
      cs::checkpoint(s, snapshot);
    }
  });
  state.check_invariants(pipeline.config().url_budget);
  cs::checkpoint(state, snapshot);
  write_blocklist_file(state.blocklist, out / "blocklist.tsv");
  std::cout << summary_json(state) << '\n';
  return 0;
}

int cmd_run(const Settings& s, const RunArgs& args) {
  cs::RunConfig config = run_config_of(s);
  config.seed_urls = args.seeds;
  if (!args.seeds_file.empty()) {
    for (auto& url : read_lines(args.seeds_file)) config.seed_urls.push_back(url);
  }
  if (config.seed_urls.empty() && args.resume.empty()) {
    throw UsageError("run needs --seed or --seeds (or --resume)");
  }

  const auto dict = dictionary_of(s);
  const cs::ForwardMaxMatchSegmenter segmenter(dict);
  const auto corpus = corpus_of(s);
  const auto backend = backend_of(s);
  cs::SearchClient search(*backend);
  Probing probing = probing_of(s);
  cs::DnsHostProber host_prober(*probing.prober, probing.targets);
  cs::HttpPageFetcher fetcher(fetch_policy_of(s));
  cs::Pipeline pipeline(config, {fetcher, search, host_prober, segmenter, *corpus});
  return drive(pipeline, args);
}

int cmd_probe(const Settings& s, const std::vector<std::string>& hosts) {
  Probing probing = probing_of(s);
  const auto outcomes = probing.prober->probe_hosts(hosts, probing.targets);
  for (const auto& o : outcomes) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& e : o.evidence) {
      evidence.push_back({{"target", e.target},
                          {"txid_matched", e.txid_matched},
                          {"answer_ips", e.answer_ips},
                          {"rtt_ms", e.rtt.count()}});
    }
    std::cout << o.host << '\t' << cs::dns::to_string(o.verdict) << '\t'
              << nlohmann::json{{"trials", o.trials},
                                {"responses_seen", o.responses_seen},
                                {"evidence", evidence}}
                     .dump()
              << '\n';
  }
  return 0;
}

int cmd_rank(const Settings& s, const std::string& input, std::size_t top) {
  const auto mode = ngram_mode_of(s);
  const auto formula = idf_of(s);
  cs::PageDocument doc;
  if (input.rfind("http://", 0) == 0 || input.rfind("https://", 0) == 0) {
    doc = cs::fetch_page(input, fetch_policy_of(s));
  } else {
    std::ifstream in(input, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + input);
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto ext = std::filesystem::path(input).extension().string();
    const bool html = ext == ".html" || ext == ".htm" || ext == ".xhtml";
    doc = cs::build_document("file://" + input, html ? "text/html" : "text/plain", buf.str(),
                             s.max_body_bytes, cs::now_seconds());
  }
  const auto dict = dictionary_of(s);
  const auto corpus = corpus_of(s);
  const auto counts = cs::extract_ngrams(cs::segment(doc.body_text, dict), mode);
  const auto scored = cs::score_phrases(counts, *corpus, formula);
  std::cout << "rank\tphrase\ttf\tdf\tscore\n";
  for (std::size_t i = 0; i < scored.size() && i < top; ++i) {
    std::cout << i + 1 << '\t' << scored[i].phrase.surface() << '\t' << scored[i].tf << '\t'
              << scored[i].df << '\t' << std::setprecision(12) << scored[i].score << '\n';
  }
  return 0;
}

int cmd_search(const Settings& s, const std::string& text) {
  const auto backend = backend_of(s);
  cs::SearchClient client(*backend);
  const auto exclusions = exclusions_of(s);
  const auto results = client.search(cs::Phrase::from_surface(text), s.results_per_query);
  std::cout << "rank\turl\thost\texcluded\n";
  for (const auto& r : results) {
    std::cout << r.rank << '\t' << r.url << '\t' << r.host << '\t'
              << (exclusions.excludes(r.host) ? "yes" : "no") << '\n';
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& snapshots, const cs::ReportOptions& options,
               const std::string& out_dir) {
  std::vector<cs::RunState> states;
  for (const auto& path : snapshots) states.push_back(cs::resume(path));
  for (const auto& path : cs::write_report_bundle(states, options, out_dir)) {
    std::cout << path.string() << '\n';
  }
  return 0;
}

int cmd_simulate(const Settings& s, const std::string& fixture_dir, RunArgs args,
                 bool emit_noise) {
  const cs::sim::World world = cs::sim::load_world(fixture_dir);
  cs::sim::Harness::Options options;
  options.emit_noise = emit_noise;
  cs::sim::Harness harness(world, options);
  cs::RunConfig config = run_config_of(s);
  config.logical_clock = true;
  if (args.out_dir.empty()) args.out_dir = (std::filesystem::path(fixture_dir) / "out").string();
  cs::Pipeline pipeline = harness.pipeline(config);
  return drive(pipeline, args);
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const cs::EmptyFrontier*>(&e)) return "EmptyFrontier";
  if (dynamic_cast<const cs::CorruptSnapshot*>(&e)) return "CorruptSnapshot";
  if (dynamic_cast<const cs::MissingReferenceFile*>(&e)) return "MissingReferenceFile";
  if (const auto* f = dynamic_cast<const cs::FetchError*>(&e)) {
    return "FetchError::" + std::string(cs::to_string(f->kind()));
  }
  if (dynamic_cast<const cs::BackendError*>(&e)) return "BackendError";
  if (dynamic_cast<const std::invalid_argument*>(&e)) return "InvalidArgument";
  return "Error";
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}}.dump(
                   -1, ' ', false, nlohmann::json::error_handler_t::replace)
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discover DNS-censored hosts through phrase search feedback."};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file; every key mirrors a long flag");
  Settings s;

  app.add_option("--log-level", s.log_level, "trace|debug|info|warn|error|off");
  app.add_option("--ngram-mode", s.ngram_mode, "unigram|bigram|trigram");
  app.add_option("--url-budget", s.url_budget, "Unique result URLs to process")
      ->check(CLI::PositiveNumber);
  app.add_option("--queries-per-page", s.queries_per_page, "Phrases searched per page")
      ->check(CLI::PositiveNumber);
  app.add_option("--results-per-query", s.results_per_query, "Result limit per search")
      ->check(CLI::Range(1, 50));
  app.add_option("--exclude", s.exclude, "Extra excluded host suffixes");
  app.add_flag("--no-default-exclusions", s.no_default_exclusions,
               "Drop the built-in social/hosting exclusions");
  app.add_option("--idf", s.idf, "smoothed-log|smoothed-inverse");
  app.add_flag("--logical-clock", s.logical_clock, "Deterministic discovery timestamps");
  app.add_option("--dictionary", s.dictionary, "Segmenter word list");
  app.add_option("--corpus", s.corpus, "Phrase document-frequency TSV");
  app.add_option("--corpus-endpoint", s.corpus_endpoint, "Remote phrase-frequency service");
  app.add_option("--corpus-size", s.corpus_size, "Document count behind --corpus-endpoint");
  app.add_option("--corpus-cache", s.corpus_cache, "Cache file for remote frequencies");
  app.add_option("--targets", s.targets_file, "Probe target list file");
  app.add_option("--target", s.targets, "Probe target ip[:port]");
  app.add_option("--control-host", s.control_host, "Uncensored name for target validation");
  app.add_option("--probe-trials", s.probe_trials)->check(CLI::PositiveNumber);
  app.add_option("--probe-wait", s.probe_wait, "Seconds to listen per trial")
      ->check(CLI::PositiveNumber);
  app.add_option("--probe-concurrency", s.probe_concurrency)->check(CLI::PositiveNumber);
  app.add_option("--simulated-censored", s.simulated_censored,
                 "Probe a local simulated injector that censors these hosts");
  app.add_option("--search-fixtures", s.search_fixtures, "Offline search fixture directory");
  app.add_option("--search-endpoint", s.search_endpoint, "Web search JSON API URL");
  app.add_option("--search-key-env", s.search_key_env, "Environment variable with the API key");
  app.add_option("--search-key-header", s.search_key_header);
  app.add_option("--search-results-pointer", s.search_results_pointer);
  app.add_option("--search-qps", s.search_qps)->check(CLI::PositiveNumber);
  app.add_option("--fetch-timeout", s.fetch_timeout)->check(CLI::PositiveNumber);
  app.add_option("--max-body-bytes", s.max_body_bytes)->check(CLI::PositiveNumber);
  app.add_option("--max-redirects", s.max_redirects)->check(CLI::NonNegativeNumber);
  app.add_option("--user-agent", s.user_agent);
  app.add_option("--per-host-delay", s.per_host_delay)->check(CLI::NonNegativeNumber);
  app.add_option("--fetch-concurrency", s.fetch_concurrency)->check(CLI::PositiveNumber);
  app.add_flag("--ignore-robots", s.ignore_robots);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Crawl from seed pages until the URL budget is spent");
  run->add_option("--seed", run_args.seeds, "Seed page URL");
  run->add_option("--seeds", run_args.seeds_file, "File of seed URLs");
  run->add_option("--out", run_args.out_dir, "Output directory");
  run->add_option("--resume", run_args.resume, "Continue from a snapshot");
  run->add_option("--checkpoint-every", run_args.checkpoint_every, "Steps between snapshots");

  std::vector<std::string> probe_hosts;
  auto* probe = app.add_subcommand("probe", "Test hostnames for DNS injection");
  probe->add_option("host", probe_hosts)->required();

  std::string rank_input;
  std::size_t rank_top = 10;
  auto* rank = app.add_subcommand("rank", "Score a page's phrases");
  rank->add_option("input", rank_input, "URL or local file")->required();
  rank->add_option("--top", rank_top)->check(CLI::PositiveNumber);

  std::string search_text;
  auto* search = app.add_subcommand("search", "Run one phrase search");
  search->add_option("phrase", search_text)->required();

  std::vector<std::string> snapshots;
  std::string report_out = "report";
  std::string rank_list;
  std::string glosses;
  std::vector<std::string> references;
  auto* report = app.add_subcommand("report", "Write CSV reports from snapshots");
  report->add_option("snapshot", snapshots, "One snapshot per run")->required();
  report->add_option("--out", report_out, "Output directory");
  report->add_option("--rank-list", rank_list, "rank,domain popularity list");
  report->add_option("--reference", references, "Reference host list for novelty counts");
  report->add_option("--glosses", glosses, "phrase<TAB>gloss file");

  std::string fixture_dir;
  RunArgs sim_args;
  sim_args.out_dir.clear();
  bool emit_noise = false;
  auto* simulate = app.add_subcommand("simulate", "Offline run against a fixture world");
  simulate->add_option("fixture-dir", fixture_dir)->required()->check(CLI::ExistingDirectory);
  simulate->add_option("--out", sim_args.out_dir, "Output directory (default <fixture>/out)");
  simulate->add_option("--checkpoint-every", sim_args.checkpoint_every);
  simulate->add_flag("--noise", emit_noise, "Simulated censor also sends decoy datagrams");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  spdlog::set_default_logger(spdlog::stderr_color_mt("censorsearch"));
  spdlog::set_level(spdlog::level::from_str(s.log_level));

  try {
    if (*run) return cmd_run(s, run_args);
    if (*probe) return cmd_probe(s, probe_hosts);
    if (*rank) return cmd_rank(s, rank_input, rank_top);
    if (*search) return cmd_search(s, search_text);
    if (*report) {
      cs::ReportOptions options;
      if (!rank_list.empty()) options.rank_list = rank_list;
      if (!glosses.empty()) options.glosses = glosses;
      for (const auto& r : references) options.references.emplace_back(r);
      return cmd_report(snapshots, options, report_out);
    }
    if (*simulate) return cmd_simulate(s, fixture_dir, sim_args, emit_noise);
  } catch (const UsageError& e) {
    print_error("UsageError", e.what());
    std::cerr << app.help();
    return 2;
  } catch (const std::exception& e) {
    print_error(error_kind(e), e.what());
    return 1;
  }
  return 2;
}
