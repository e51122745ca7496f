#include "censorsearch/page_ingest/page.h"

namespace censorsearch {

void FixturePageSource::add(std::string url, Entry entry) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(std::move(url), std::move(entry));
}

PageDocument FixturePageSource::fetch(const std::string& url) {
  const Entry* entry = nullptr;
  {
    std::lock_guard lock(mutex_);
    ++fetch_count_;
    const auto it = entries_.find(url);
    if (it != entries_.end()) entry = &it->second;
  }
  if (entry == nullptr) {
    throw FetchError(FetchError::Kind::kTransportFailure, "no fixture for " + url);
  }
  return build_document(url, entry->content_type, entry->body, max_body_bytes_,
                        now_seconds());
}

std::size_t FixturePageSource::fetch_count() const {
  std::lock_guard lock(mutex_);
  return fetch_count_;
}

}  // namespace censorsearch
