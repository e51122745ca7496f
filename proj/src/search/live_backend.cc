#include <httplib.h>

#include <json.hpp>
#include <thread>

#include "censorsearch/net/url.h"
#include "censorsearch/search/search.h"

namespace censorsearch {

std::vector<std::string> parse_result_urls(std::string_view json_body,
                                           const std::string& results_pointer,
                                           const std::string& url_field) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendError::Kind::kMalformedResponse, e.what());
  }
  std::vector<std::string> urls;
  const nlohmann::json::json_pointer pointer(results_pointer);
  if (!doc.contains(pointer)) return urls;  // no results section: empty page
  const auto& items = doc.at(pointer);
  if (!items.is_array()) {
    throw BackendError(BackendError::Kind::kMalformedResponse,
                       results_pointer + " is not an array");
  }
  for (const auto& item : items) {
    if (item.is_string()) {
      urls.push_back(item.get<std::string>());
    } else if (item.is_object() && item.contains(url_field) &&
               item[url_field].is_string()) {
      urls.push_back(item[url_field].get<std::string>());
    }
  }
  return urls;
}

LiveSearchBackend::LiveSearchBackend(Options options)
    : options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(
          std::clamp<std::size_t>(options_.max_in_flight, 1, 256))) {
  if (!parse_http_url(options_.endpoint)) {
    throw std::invalid_argument("invalid search endpoint: " + options_.endpoint);
  }
  if (options_.max_qps <= 0) throw std::invalid_argument("max_qps must be > 0");
}

std::vector<std::string> LiveSearchBackend::query(const std::string& text,
                                                  std::size_t limit) {
  in_flight_.acquire();
  struct Release {
    std::counting_semaphore<256>& sem;
    ~Release() { sem.release(); }
  } release{in_flight_};
  {
    std::chrono::steady_clock::time_point slot;
    {
      std::lock_guard lock(throttle_mutex_);
      slot = std::max(std::chrono::steady_clock::now(), next_slot_);
      next_slot_ = slot + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(1.0 / options_.max_qps));
    }
    std::this_thread::sleep_until(slot);
  }

  const auto endpoint = parse_http_url(options_.endpoint);
  std::string target = endpoint->target;
  target += target.find('?') == std::string::npos ? '?' : '&';
  target += url_encode(options_.query_param) + "=" + url_encode(text);
  if (!options_.count_param.empty()) {
    target += "&" + url_encode(options_.count_param) + "=" + std::to_string(limit);
  }
  for (const auto& [key, value] : options_.extra_params) {
    target += "&" + url_encode(key) + "=" + url_encode(value);
  }
  httplib::Client client(endpoint->scheme + "://" + endpoint->host + ":" +
                         std::to_string(endpoint->port));
  const auto timeout =
      std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace(options_.api_key_header, options_.api_key);

  auto result = client.Get(target, headers);
  if (!result) {
    throw BackendError(BackendError::Kind::kHttp,
                       "search request failed: " + httplib::to_string(result.error()));
  }
  if (result->status == 429) throw RateLimited("search backend returned HTTP 429");
  if (result->status == 402 || result->status == 403) {
    throw BackendError(BackendError::Kind::kQuotaExhausted,
                       "search backend returned HTTP " + std::to_string(result->status));
  }
  if (result->status != 200) {
    throw BackendError(BackendError::Kind::kHttp,
                       "search backend returned HTTP " + std::to_string(result->status));
  }
  auto urls = parse_result_urls(result->body, options_.results_pointer, options_.url_field);
  if (urls.size() > limit) urls.resize(limit);
  return urls;
}

}  // namespace censorsearch
