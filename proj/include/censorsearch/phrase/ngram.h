#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "censorsearch/phrase/segmenter.h"

namespace censorsearch {

enum class NgramMode { kUnigram = 1, kBigram = 2, kTrigram = 3 };

std::string_view to_string(NgramMode mode);
std::optional<NgramMode> parse_ngram_mode(std::string_view name);

// An n-gram of 1-3 tokens. Identity, ordering and hashing all go through the
// surface form (tokens joined by one space), which determines the tokens.
class Phrase {
 public:
  Phrase() = default;
  // Throws std::invalid_argument unless 1 <= tokens.size() <= 3.
  explicit Phrase(std::vector<Token> tokens);
  // Splits on single spaces and classifies each token.
  static Phrase from_surface(std::string_view surface);

  const std::vector<Token>& tokens() const { return tokens_; }
  std::size_t n() const { return tokens_.size(); }
  const std::string& surface() const { return surface_; }

  friend bool operator==(const Phrase& a, const Phrase& b) {
    return a.surface_ == b.surface_;
  }
  friend std::strong_ordering operator<=>(const Phrase& a, const Phrase& b) {
    return a.surface_ <=> b.surface_;
  }

 private:
  std::vector<Token> tokens_;
  std::string surface_;
};

using PhraseCounts = std::map<Phrase, std::size_t>;

// Digits-only tokens and single Latin letters never appear in phrases.
bool is_stop_token(const Token& token);

// Counts every window of n consecutive tokens inside each sentence. Windows
// holding a stop token are dropped. Throws std::invalid_argument unless
// n is 1, 2 or 3.
PhraseCounts extract_ngrams(const std::vector<Sentence>& sentences, std::size_t n);

inline PhraseCounts extract_ngrams(const std::vector<Sentence>& sentences, NgramMode mode) {
  return extract_ngrams(sentences, static_cast<std::size_t>(mode));
}

}  // namespace censorsearch
