#include <iconv.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <stdexcept>
#include <string>

#include "censorsearch/net/url.h"
#include "censorsearch/page_ingest/page.h"
#include "censorsearch/text/utf8.h"

namespace censorsearch {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim_charset(std::string_view value) {
  std::size_t start = 0;
  while (start < value.size() &&
         (value[start] == ' ' || value[start] == '"' || value[start] == '\'')) {
    ++start;
  }
  std::size_t end = start;
  while (end < value.size() &&
         (std::isalnum(static_cast<unsigned char>(value[end])) ||
          value[end] == '-' || value[end] == '_' || value[end] == '.' ||
          value[end] == ':')) {
    ++end;
  }
  return lower(value.substr(start, end - start));
}

// Maps web labels onto iconv names. GB2312 and GBK labels decode as GB18030,
// which is a superset of both.
std::string iconv_name(const std::string& charset) {
  if (charset == "gb2312" || charset == "gbk" || charset == "x-gbk" ||
      charset == "gb18030" || charset == "gb_2312-80" || charset == "chinese" ||
      charset == "csgb2312" || charset == "iso-ir-58") {
    return "GB18030";
  }
  if (charset == "big5" || charset == "big5-hkscs" || charset == "x-x-big5") {
    return "BIG5-HKSCS";
  }
  if (charset == "iso-8859-1" || charset == "latin1" || charset == "us-ascii" ||
      charset == "ascii") {
    return "WINDOWS-1252";
  }
  return charset;
}

bool is_utf8_label(const std::string& charset) {
  return charset.empty() || charset == "utf-8" || charset == "utf8" ||
         charset == "unicode-1-1-utf-8";
}

}  // namespace

std::string_view to_string(FetchError::Kind kind) {
  switch (kind) {
    case FetchError::Kind::kTimeout: return "timeout";
    case FetchError::Kind::kTooManyRedirects: return "too_many_redirects";
    case FetchError::Kind::kNonHtmlContent: return "non_html_content";
    case FetchError::Kind::kTransportFailure: return "transport_failure";
    case FetchError::Kind::kDisallowedByRobots: return "disallowed_by_robots";
  }
  return "unknown";
}

void FetchPolicy::validate() const {
  if (timeout.count() <= 0) throw std::invalid_argument("fetch timeout must be > 0");
  if (max_body_bytes == 0) throw std::invalid_argument("max_body_bytes must be > 0");
  if (max_redirects < 0) throw std::invalid_argument("max_redirects must be >= 0");
  if (max_in_flight == 0) throw std::invalid_argument("max_in_flight must be > 0");
}

std::optional<std::string> charset_from_content_type(std::string_view content_type) {
  const std::string ct = lower(content_type);
  const auto pos = ct.find("charset=");
  if (pos == std::string::npos) return std::nullopt;
  std::string cs = trim_charset(std::string_view(ct).substr(pos + 8));
  if (cs.empty()) return std::nullopt;
  return cs;
}

std::optional<std::string> sniff_meta_charset(std::string_view html_bytes) {
  const std::string head = lower(html_bytes.substr(0, 4096));
  std::size_t pos = 0;
  while ((pos = head.find("<meta", pos)) != std::string::npos) {
    const auto end = head.find('>', pos);
    const std::string_view tag = std::string_view(head).substr(
        pos, end == std::string::npos ? std::string::npos : end - pos);
    if (const auto cs = tag.find("charset="); cs != std::string_view::npos) {
      std::string value = trim_charset(tag.substr(cs + 8));
      if (!value.empty()) return value;
    }
    pos += 5;
  }
  return std::nullopt;
}

std::string decode_to_utf8(std::string_view bytes, std::string_view charset) {
  const std::string label = lower(charset);
  if (is_utf8_label(label)) return utf8::sanitize(bytes);
  iconv_t cd = iconv_open("UTF-8", iconv_name(label).c_str());
  if (cd == reinterpret_cast<iconv_t>(-1)) return utf8::sanitize(bytes);

  std::string out;
  out.reserve(bytes.size() * 3 / 2);
  std::string input(bytes);
  char* in_ptr = input.data();
  std::size_t in_left = input.size();
  char buffer[4096];
  while (in_left > 0) {
    char* out_ptr = buffer;
    std::size_t out_left = sizeof(buffer);
    const std::size_t rc = iconv(cd, &in_ptr, &in_left, &out_ptr, &out_left);
    out.append(buffer, static_cast<std::size_t>(out_ptr - buffer));
    if (rc == static_cast<std::size_t>(-1)) {
      if (errno == E2BIG) continue;
      // EILSEQ or a truncated trailing sequence: substitute and resync.
      utf8::append(out, utf8::kReplacement);
      ++in_ptr;
      --in_left;
      iconv(cd, nullptr, nullptr, nullptr, nullptr);
    }
  }
  iconv_close(cd);
  return utf8::sanitize(out);
}

PageDocument build_document(std::string_view url, std::string_view content_type,
                            std::string_view body, std::size_t max_body_bytes,
                            Timestamp fetched_at) {
  const std::string ct = lower(content_type);
  std::string mime = ct.substr(0, ct.find(';'));
  mime.erase(0, mime.find_first_not_of(" \t"));
  mime.erase(mime.find_last_not_of(" \t") + 1);
  const bool html = mime.empty() || mime == "text/html" ||
                    mime == "application/xhtml+xml";
  const bool plain = mime == "text/plain";
  if (!html && !plain) {
    throw FetchError(FetchError::Kind::kNonHtmlContent,
                     "unsupported content type '" + std::string(content_type) +
                         "' for " + std::string(url));
  }
  const std::string_view capped = body.substr(0, max_body_bytes);
  PageDocument doc;
  doc.url = std::string(url);
  doc.host = host_of(url);
  doc.fetched_at = fetched_at;
  doc.content_bytes_read = capped.size();
  const auto declared = charset_from_content_type(content_type);
  if (html) {
    doc.body_text = declared ? extract_text(capped, *declared) : extract_text(capped);
  } else {
    doc.body_text =
        normalize_plain_text(decode_to_utf8(capped, declared.value_or("utf-8")));
  }
  return doc;
}

}  // namespace censorsearch
