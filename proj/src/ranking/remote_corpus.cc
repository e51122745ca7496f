#include <httplib.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "censorsearch/net/url.h"
#include "censorsearch/ranking/corpus.h"

namespace censorsearch {

RemoteCorpusClient::RemoteCorpusClient(Options options) : options_(std::move(options)) {
  if (options_.corpus_size == 0) throw std::invalid_argument("corpus size must be >= 1");
  if (!parse_http_url(options_.endpoint)) {
    throw std::invalid_argument("invalid corpus endpoint: " + options_.endpoint);
  }
  if (options_.cache_path.empty()) return;
  std::ifstream in(options_.cache_path);
  for (std::string line; std::getline(in, line);) {
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) continue;
    std::uint64_t df = 0;
    const auto digits = std::string_view(line).substr(tab + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), df);
    if (ec != std::errc{}) continue;
    cache_[line.substr(0, tab)] = std::min(df, options_.corpus_size);
  }
}

std::optional<std::uint64_t> RemoteCorpusClient::query(const std::string& surface) const {
  const auto endpoint = parse_http_url(options_.endpoint);
  std::string target = endpoint->target;
  target += target.find('?') == std::string::npos ? '?' : '&';
  target += url_encode(options_.query_param) + "=" + url_encode(surface);
  for (const auto& [key, value] : options_.extra_params) {
    target += "&" + url_encode(key) + "=" + url_encode(value);
  }
  httplib::Client client(endpoint->scheme + "://" + endpoint->host + ":" +
                         std::to_string(endpoint->port));
  const auto timeout =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  auto result = client.Get(target);
  if (!result) {
    spdlog::warn("corpus lookup for '{}' failed: {}", surface,
                 httplib::to_string(result.error()));
    return std::nullopt;
  }
  if (result->status != 200) {
    spdlog::warn("corpus lookup for '{}' returned HTTP {}", surface, result->status);
    return std::nullopt;
  }
  const std::string& body = result->body;
  const auto start = std::find_if(body.begin(), body.end(),
                                  [](unsigned char c) { return std::isdigit(c); });
  if (start == body.end()) {
    spdlog::warn("corpus lookup for '{}' returned no integer", surface);
    return std::nullopt;
  }
  std::uint64_t df = 0;
  const auto [ptr, ec] = std::from_chars(&*start, body.data() + body.size(), df);
  if (ec != std::errc{}) {
    spdlog::warn("corpus lookup for '{}' returned an unparseable integer", surface);
    return std::nullopt;
  }
  return df;
}

std::uint64_t RemoteCorpusClient::document_frequency(const Phrase& phrase) const {
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(phrase.surface()); it != cache_.end()) return it->second;
  }
  const auto answer = query(phrase.surface());
  std::unique_lock lock(mutex_);
  ++remote_lookups_;
  if (!answer) return 0;
  const std::uint64_t df = std::min(*answer, options_.corpus_size);
  if (cache_.emplace(phrase.surface(), df).second && !options_.cache_path.empty()) {
    std::ofstream out(options_.cache_path, std::ios::app);
    out << phrase.surface() << '\t' << df << '\n';
  }
  return df;
}

std::size_t RemoteCorpusClient::remote_lookups() const {
  std::shared_lock lock(mutex_);
  return remote_lookups_;
}

}  // namespace censorsearch
