#include <fstream>
#include <json.hpp>

#include "censorsearch/search/search.h"
#include "censorsearch/util/hash.h"

namespace censorsearch {
namespace {

std::string_view kind_name(BackendError::Kind kind) {
  switch (kind) {
    case BackendError::Kind::kHttp: return "http";
    case BackendError::Kind::kQuotaExhausted: return "quota";
    case BackendError::Kind::kMalformedResponse: return "malformed";
    case BackendError::Kind::kRateLimited: return "rate_limited";
  }
  return "http";
}

[[noreturn]] void throw_kind(BackendError::Kind kind, const std::string& query) {
  const std::string what = "mock backend " + std::string(kind_name(kind)) +
                           " failure for '" + query + "'";
  if (kind == BackendError::Kind::kRateLimited) throw RateLimited(what);
  throw BackendError(kind, what);
}

}  // namespace

MockSearchBackend::MockSearchBackend(std::filesystem::path fixture_dir)
    : fixture_dir_(std::move(fixture_dir)) {
  if (!std::filesystem::is_directory(fixture_dir_)) {
    throw std::runtime_error("search fixture directory not found: " +
                             fixture_dir_.string());
  }
}

std::filesystem::path MockSearchBackend::fixture_path(const std::filesystem::path& dir,
                                                      std::string_view query) {
  return dir / (sha256_hex(query) + ".json");
}

void MockSearchBackend::write_fixture(const std::filesystem::path& dir,
                                      std::string_view query,
                                      const std::vector<std::string>& urls) {
  std::filesystem::create_directories(dir);
  nlohmann::json doc = {{"query", query}, {"results", urls}};
  std::ofstream out(fixture_path(dir, query), std::ios::trunc);
  out << doc.dump(2) << '\n';
}

void MockSearchBackend::set_results(std::string query, std::vector<std::string> urls) {
  std::lock_guard lock(mutex_);
  results_.insert_or_assign(std::move(query), std::move(urls));
}

void MockSearchBackend::push_failure(BackendError::Kind kind) {
  std::lock_guard lock(mutex_);
  failures_.push_back(kind);
}

std::vector<std::string> MockSearchBackend::queries_seen() const {
  std::lock_guard lock(mutex_);
  return queries_;
}

std::vector<std::string> MockSearchBackend::query(const std::string& text,
                                                  std::size_t limit) {
  ++calls_;
  std::vector<std::string> urls;
  {
    std::lock_guard lock(mutex_);
    queries_.push_back(text);
    if (!failures_.empty()) {
      const auto kind = failures_.front();
      failures_.pop_front();
      throw_kind(kind, text);
    }
    if (auto it = results_.find(text); it != results_.end()) urls = it->second;
  }
  if (urls.empty() && !fixture_dir_.empty()) {
    const auto path = fixture_path(fixture_dir_, text);
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw BackendError(BackendError::Kind::kMalformedResponse,
                           path.string() + ": " + e.what());
      }
      if (doc.contains("error")) {
        const auto name = doc["error"].get<std::string>();
        if (name == "rate_limited") throw_kind(BackendError::Kind::kRateLimited, text);
        if (name == "quota") throw_kind(BackendError::Kind::kQuotaExhausted, text);
        if (name == "malformed") throw_kind(BackendError::Kind::kMalformedResponse, text);
        throw_kind(BackendError::Kind::kHttp, text);
      }
      if (!doc.contains("results") || !doc["results"].is_array()) {
        throw BackendError(BackendError::Kind::kMalformedResponse,
                           path.string() + ": missing results array");
      }
      for (const auto& url : doc["results"]) {
        if (url.is_string()) urls.push_back(url.get<std::string>());
      }
    }
  }
  if (urls.size() > limit) urls.resize(limit);
  return urls;
}

}  // namespace censorsearch
