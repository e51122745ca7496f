#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace censorsearch {

enum class Script { kHan, kLatin, kOther };

std::string_view to_string(Script script);

// One segmented word. Text is non-empty and free of whitespace.
struct Token {
  std::string text;
  Script script = Script::kOther;

  auto operator<=>(const Token&) const = default;
};

// Tokens between two sentence boundaries. Boundaries are implicit: n-grams
// are formed within a Sentence, never across two.
using Sentence = std::vector<Token>;

// Character classes used by the segmenter.
bool is_han(char32_t cp);
bool is_latin_alnum(char32_t cp);
bool is_segment_space(char32_t cp);
// Punctuation, newlines and symbols all end a sentence.
bool is_boundary(char32_t cp);

// Han iff every character is a CJK unified ideograph; Latin iff every
// character is ASCII alphanumeric; Other otherwise.
Script classify_script(std::string_view text);

// Known multi-character Han words for forward maximum matching.
class SegmenterDictionary {
 public:
  SegmenterDictionary() = default;
  explicit SegmenterDictionary(const std::vector<std::string>& words);

  // One word per line, UTF-8; blank lines and lines starting with '#' are
  // skipped. Throws std::runtime_error if the file cannot be read.
  static SegmenterDictionary load(const std::filesystem::path& path);

  void add(std::string_view word);
  bool contains(std::u32string_view word) const;
  std::size_t max_word_len() const { return max_word_len_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_set<std::u32string> entries_;
  std::size_t max_word_len_ = 0;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual std::vector<Sentence> segment(std::string_view text) const = 0;
};

// Latin and other scripts split on whitespace and punctuation; Han runs are
// segmented greedily by longest dictionary prefix, with unmatched characters
// falling back to single-character tokens.
class ForwardMaxMatchSegmenter : public Segmenter {
 public:
  explicit ForwardMaxMatchSegmenter(const SegmenterDictionary& dict) : dict_(dict) {}
  std::vector<Sentence> segment(std::string_view text) const override;

 private:
  const SegmenterDictionary& dict_;
};

std::vector<Sentence> segment(std::string_view text, const SegmenterDictionary& dict);

}  // namespace censorsearch
