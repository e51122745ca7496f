#include "censorsearch/sim/world.h"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace censorsearch::sim {

using nlohmann::json;

World load_world(const std::filesystem::path& dir) {
  const auto path = dir / "world.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed " + path.string() + ": " + e.what());
  }
  World w;
  try {
    w.seeds = j.at("seeds").get<std::vector<std::string>>();
    w.censored_hosts = j.value("censored_hosts", std::set<std::string>{});
    w.control_host = j.value("control_host", w.control_host);
    for (const auto& p : j.value("pages", json::array())) {
      FixturePageSource::Entry entry;
      entry.content_type = p.value("content_type", entry.content_type);
      entry.body = p.at("body").get<std::string>();
      w.pages.emplace_back(p.at("url").get<std::string>(), std::move(entry));
    }
    w.dictionary = j.value("dictionary", std::vector<std::string>{});
    if (j.contains("corpus")) {
      w.corpus_size = j["corpus"].value("size", w.corpus_size);
      w.document_frequencies =
          j["corpus"].value("df", std::map<std::string, std::uint64_t>{});
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed " + path.string() + ": " + e.what());
  }
  if (std::filesystem::is_directory(dir / "search")) w.search_dir = dir / "search";
  return w;
}

void save_world(const World& world, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "search");
  json pages = json::array();
  for (const auto& [url, entry] : world.pages) {
    pages.push_back({{"url", url}, {"content_type", entry.content_type}, {"body", entry.body}});
  }
  const json j = {{"seeds", world.seeds},
                  {"censored_hosts", world.censored_hosts},
                  {"control_host", world.control_host},
                  {"pages", pages},
                  {"dictionary", world.dictionary},
                  {"corpus", {{"size", world.corpus_size}, {"df", world.document_frequencies}}}};
  std::ofstream out(dir / "world.json", std::ios::trunc);
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("cannot write " + (dir / "world.json").string());
  for (const auto& [query, urls] : world.search_results) {
    MockSearchBackend::write_fixture(dir / "search", query, urls);
  }
}

Harness::Harness(const World& world) : Harness(world, Options{}) {}

Harness::Harness(const World& world, Options options) : seeds_(world.seeds) {
  for (std::size_t i = 0; i < std::max<std::size_t>(options.censor_count, 1); ++i) {
    dns::SimulatedCensor::Options censor;
    censor.mode = options.mode;
    censor.censored_hosts = world.censored_hosts;
    censor.emit_noise = options.emit_noise;
    censors_.push_back(std::make_unique<dns::SimulatedCensor>(censor));
  }
  prober_ = std::make_unique<dns::DnsProber>(options.probe);
  for (const auto& c : censors_) {
    auto target = c->target();
    prober_->validate_target(target, world.control_host);
    targets_.push_back(target);
  }
  host_prober_ = std::make_unique<DnsHostProber>(*prober_, targets_);

  pages_ = std::make_unique<FixturePageSource>();
  for (const auto& [url, entry] : world.pages) pages_->add(url, entry);

  backend_ = world.search_dir ? std::make_unique<MockSearchBackend>(*world.search_dir)
                              : std::make_unique<MockSearchBackend>();
  for (const auto& [query, urls] : world.search_results) backend_->set_results(query, urls);
  search_ = std::make_unique<SearchClient>(*backend_);

  dictionary_ = SegmenterDictionary(world.dictionary);
  segmenter_ = std::make_unique<ForwardMaxMatchSegmenter>(dictionary_);
  corpus_ = std::make_unique<LocalCorpus>(world.corpus_size);
  for (const auto& [surface, df] : world.document_frequencies) corpus_->set(surface, df);
}

Harness::~Harness() = default;

Pipeline Harness::pipeline(RunConfig config) {
  if (config.seed_urls.empty()) config.seed_urls = seeds_;
  return Pipeline(std::move(config),
                  PipelineDeps{*pages_, *search_, *host_prober_, *segmenter_, *corpus_});
}

}  // namespace censorsearch::sim
