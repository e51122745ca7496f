#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <unordered_map>

#include "censorsearch/page_ingest/page.h"
#include "censorsearch/text/utf8.h"

namespace censorsearch {
namespace {

bool ascii_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)); }

bool iequals_at(std::string_view text, std::size_t pos, std::string_view word) {
  if (pos + word.size() > text.size()) return false;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) {
      return false;
    }
  }
  return true;
}

std::size_t ifind(std::string_view text, std::string_view word, std::size_t from) {
  for (std::size_t i = from; i + word.size() <= text.size(); ++i) {
    if (iequals_at(text, i, word)) return i;
  }
  return std::string_view::npos;
}

// Tags that do not break a run of text. Everything else separates words.
bool is_inline_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 24> kInline = {
      "a",    "abbr", "b",      "bdi",  "bdo",  "big",  "cite", "code",
      "del",  "dfn",  "em",     "font", "i",    "ins",  "kbd",  "mark",
      "q",    "s",    "samp",   "small", "span", "strong", "sub", "sup"};
  return std::find(kInline.begin(), kInline.end(), name) != kInline.end() ||
         name == "tt" || name == "u" || name == "wbr" || name == "strike";
}

// Returns the index one past the closing '>' of a tag starting at `pos`,
// honoring quoted attribute values. Unterminated tags run to the end.
std::size_t skip_tag(std::string_view html, std::size_t pos) {
  char quote = 0;
  for (std::size_t i = pos + 1; i < html.size(); ++i) {
    const char c = html[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return i + 1;
    }
  }
  return html.size();
}

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> kEntities = {
      {"amp", U'＆'},    {"lt", U'＜'},      {"gt", U'＞'},
      {"quot", U'"'},    {"apos", U'\''},    {"nbsp", U' '},
      {"copy", 0xA9},    {"reg", 0xAE},      {"middot", 0xB7},
      {"laquo", 0xAB},   {"raquo", 0xBB},    {"mdash", 0x2014},
      {"ndash", 0x2013}, {"hellip", 0x2026}, {"ldquo", 0x201C},
      {"rdquo", 0x201D}, {"lsquo", 0x2018},  {"rsquo", 0x2019},
      {"times", 0xD7},   {"bull", 0x2022},   {"emsp", U' '},
      {"ensp", U' '},    {"thinsp", U' '},
  };
  return kEntities;
}

// Decodes the entity at `pos` (which points at '&'). On success stores the
// code point and returns the length consumed; 0 means "not an entity".
std::size_t decode_entity(std::string_view text, std::size_t pos, char32_t& out) {
  const auto semi = text.find(';', pos + 1);
  if (semi == std::string_view::npos || semi - pos > 12) return 0;
  const std::string_view body = text.substr(pos + 1, semi - pos - 1);
  if (body.empty()) return 0;
  if (body.front() == '#') {
    std::string_view digits = body.substr(1);
    int base = 10;
    if (!digits.empty() && (digits.front() == 'x' || digits.front() == 'X')) {
      base = 16;
      digits.remove_prefix(1);
    }
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(
        digits.data(), digits.data() + digits.size(), value, base);
    if (digits.empty() || ec != std::errc{} ||
        ptr != digits.data() + digits.size()) {
      return 0;
    }
    if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
      out = utf8::kReplacement;
    } else if (value == '<') {
      out = U'＜';
    } else if (value == '>') {
      out = U'＞';
    } else if (value == '&') {
      out = U'＆';
    } else {
      out = value;
    }
    return semi - pos + 1;
  }
  const auto& table = named_entities();
  const auto it = table.find(body);
  if (it == table.end()) return 0;
  out = it->second;
  return semi - pos + 1;
}

bool is_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' ||
         cp == '\v' || cp == 0xA0 || cp == 0x3000 || cp == 0x2028 ||
         cp == 0x2029 || (cp >= 0x2000 && cp <= 0x200A);
}

bool is_control(char32_t cp) {
  return cp < 0x20 || cp == 0x7F || (cp >= 0x80 && cp < 0xA0) ||
         cp == 0x200B || cp == 0xFEFF;
}

// Accumulates code points while collapsing whitespace runs.
class TextBuilder {
 public:
  void push(char32_t cp) {
    if (is_space(cp)) {
      pending_space_ = !out_.empty();
      return;
    }
    if (is_control(cp)) return;
    if (pending_space_) {
      out_.push_back(' ');
      pending_space_ = false;
    }
    utf8::append(out_, cp);
  }
  void separate() { pending_space_ = !out_.empty(); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
  bool pending_space_ = false;
};

std::string strip_markup(std::string_view html) {
  TextBuilder text;
  std::size_t pos = 0;
  while (pos < html.size()) {
    const char c = html[pos];
    if (c == '<') {
      if (html.substr(pos).starts_with("<!--")) {
        const auto end = html.find("-->", pos + 4);
        pos = end == std::string_view::npos ? html.size() : end + 3;
        continue;
      }
      const bool declaration =
          pos + 1 < html.size() && (html[pos + 1] == '!' || html[pos + 1] == '?');
      const bool open_tag = pos + 1 < html.size() && ascii_alpha(html[pos + 1]);
      const bool close_tag = pos + 2 < html.size() && html[pos + 1] == '/' &&
                             ascii_alpha(html[pos + 2]);
      if (declaration) {
        pos = skip_tag(html, pos);
        text.separate();
        continue;
      }
      if (open_tag || close_tag) {
        std::size_t name_start = pos + (close_tag ? 2 : 1);
        std::size_t name_end = name_start;
        while (name_end < html.size() &&
               (std::isalnum(static_cast<unsigned char>(html[name_end])) ||
                html[name_end] == '-' || html[name_end] == ':')) {
          ++name_end;
        }
        std::string name(html.substr(name_start, name_end - name_start));
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char ch) { return std::tolower(ch); });
        pos = skip_tag(html, pos);
        if (open_tag && (name == "script" || name == "style")) {
          const std::string closing = "</" + name;
          const auto end = ifind(html, closing, pos);
          pos = end == std::string_view::npos ? html.size() : skip_tag(html, end);
        }
        if (!is_inline_tag(name)) text.separate();
        continue;
      }
      text.push(U'＜');
      ++pos;
      continue;
    }
    if (c == '&') {
      char32_t cp = 0;
      if (const auto used = decode_entity(html, pos, cp); used > 0) {
        text.push(cp);
        pos += used;
        continue;
      }
      text.push(U'＆');
      ++pos;
      continue;
    }
    text.push(utf8::next(html, pos));
  }
  return text.take();
}

}  // namespace

std::string extract_text(std::string_view html_bytes,
                         std::optional<std::string_view> declared_charset) {
  std::string charset = "utf-8";
  if (declared_charset && !declared_charset->empty()) {
    charset = std::string(*declared_charset);
  } else if (auto meta = sniff_meta_charset(html_bytes)) {
    charset = *meta;
  }
  const std::string decoded = decode_to_utf8(html_bytes, charset);
  return strip_markup(decoded);
}

std::string normalize_plain_text(std::string_view text) {
  TextBuilder out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = utf8::next(text, pos);
    out.push(cp == '<' ? U'＜' : cp == '&' ? U'＆' : cp);
  }
  return out.take();
}

}  // namespace censorsearch
