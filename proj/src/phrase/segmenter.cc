#include "censorsearch/phrase/segmenter.h"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "censorsearch/text/utf8.h"

namespace censorsearch {

std::string_view to_string(Script script) {
  switch (script) {
    case Script::kHan: return "han";
    case Script::kLatin: return "latin";
    case Script::kOther: return "other";
  }
  return "other";
}

bool is_han(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK Unified Ideographs
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // Extension A
         (cp >= 0x20000 && cp <= 0x2A6DF) ||  // Extension B
         (cp >= 0x2A700 && cp <= 0x2EBEF) ||  // Extensions C-F
         (cp >= 0x30000 && cp <= 0x323AF);    // Extensions G-H
}

bool is_latin_alnum(char32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') ||
         (cp >= 'A' && cp <= 'Z');
}

bool is_segment_space(char32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\r' || cp == '\f' || cp == '\v' ||
         cp == 0xA0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200B) ||
         cp == 0xFEFF || (cp < 0x20 && cp != '\n') || cp == 0x7F ||
         (cp >= 0x80 && cp < 0xA0);
}

bool is_boundary(char32_t cp) {
  if (cp == '\n' || cp == 0x2028 || cp == 0x2029) return true;
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x2190 && cp <= 0x2BFF) ||  // arrows, math, technical, shapes
         (cp >= 0x2E00 && cp <= 0x2E7F) ||
         (cp >= 0x3001 && cp <= 0x3004) || (cp >= 0x3008 && cp <= 0x3020) ||
         cp == 0x3030 || cp == 0x303D || cp == 0x30FB ||
         (cp >= 0xFE10 && cp <= 0xFE1F) || (cp >= 0xFE30 && cp <= 0xFE6F) ||
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65) ||
         (cp >= 0xFFE0 && cp <= 0xFFEE) || cp == utf8::kReplacement;
}

Script classify_script(std::string_view text) {
  const auto cps = utf8::decode(text);
  if (cps.empty()) return Script::kOther;
  if (std::all_of(cps.begin(), cps.end(), is_han)) return Script::kHan;
  if (std::all_of(cps.begin(), cps.end(), is_latin_alnum)) return Script::kLatin;
  return Script::kOther;
}

SegmenterDictionary::SegmenterDictionary(const std::vector<std::string>& words) {
  for (const auto& w : words) add(w);
}

void SegmenterDictionary::add(std::string_view word) {
  auto cps = utf8::decode(word);
  if (cps.empty()) return;
  max_word_len_ = std::max(max_word_len_, cps.size());
  entries_.emplace(cps.begin(), cps.end());
}

bool SegmenterDictionary::contains(std::u32string_view word) const {
  return entries_.contains(std::u32string(word));
}

SegmenterDictionary SegmenterDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dictionary " + path.string());
  SegmenterDictionary dict;
  for (std::string line; std::getline(in, line);) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t')) {
      line.pop_back();
    }
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    dict.add(std::string_view(line).substr(start));
  }
  return dict;
}

namespace {

class SentenceBuilder {
 public:
  explicit SentenceBuilder(const SegmenterDictionary& dict) : dict_(dict) {}

  void feed(char32_t cp) {
    if (is_boundary(cp)) {
      flush_run();
      end_sentence();
    } else if (is_segment_space(cp)) {
      flush_run();
    } else {
      const bool han = is_han(cp);
      if (!run_.empty() && han != run_is_han_) flush_run();
      run_is_han_ = han;
      run_.push_back(cp);
    }
  }

  std::vector<Sentence> finish() {
    flush_run();
    end_sentence();
    return std::move(sentences_);
  }

 private:
  void emit(std::u32string_view cps) {
    std::string text;
    for (char32_t cp : cps) utf8::append(text, cp);
    Script script = classify_script(text);
    current_.push_back(Token{std::move(text), script});
  }

  void flush_run() {
    if (run_.empty()) return;
    if (!run_is_han_) {
      emit(run_);
    } else {
      const std::u32string_view run = run_;
      std::size_t pos = 0;
      while (pos < run.size()) {
        std::size_t len = std::min(dict_.max_word_len(), run.size() - pos);
        while (len > 1 && !dict_.contains(run.substr(pos, len))) --len;
        len = std::max<std::size_t>(len, 1);
        emit(run.substr(pos, len));
        pos += len;
      }
    }
    run_.clear();
  }

  void end_sentence() {
    if (!current_.empty()) sentences_.push_back(std::move(current_));
    current_.clear();
  }

  const SegmenterDictionary& dict_;
  std::u32string run_;
  bool run_is_han_ = false;
  Sentence current_;
  std::vector<Sentence> sentences_;
};

}  // namespace

std::vector<Sentence> ForwardMaxMatchSegmenter::segment(std::string_view text) const {
  SentenceBuilder builder(dict_);
  std::size_t pos = 0;
  while (pos < text.size()) builder.feed(utf8::next(text, pos));
  return builder.finish();
}

std::vector<Sentence> segment(std::string_view text, const SegmenterDictionary& dict) {
  return ForwardMaxMatchSegmenter(dict).segment(text);
}

}  // namespace censorsearch
