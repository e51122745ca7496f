#include "censorsearch/phrase/ngram.h"

#include <algorithm>
#include <stdexcept>

namespace censorsearch {

std::string_view to_string(NgramMode mode) {
  switch (mode) {
    case NgramMode::kUnigram: return "unigram";
    case NgramMode::kBigram: return "bigram";
    case NgramMode::kTrigram: return "trigram";
  }
  return "unigram";
}

std::optional<NgramMode> parse_ngram_mode(std::string_view name) {
  if (name == "unigram" || name == "1") return NgramMode::kUnigram;
  if (name == "bigram" || name == "2") return NgramMode::kBigram;
  if (name == "trigram" || name == "3") return NgramMode::kTrigram;
  return std::nullopt;
}

Phrase::Phrase(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_.size() > 3) {
    throw std::invalid_argument("a phrase holds 1 to 3 tokens");
  }
  for (const auto& t : tokens_) {
    if (t.text.empty()) throw std::invalid_argument("empty token in phrase");
    if (!surface_.empty()) surface_.push_back(' ');
    surface_ += t.text;
  }
}

Phrase Phrase::from_surface(std::string_view surface) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos <= surface.size()) {
    const auto space = surface.find(' ', pos);
    const auto piece = surface.substr(pos, space == std::string_view::npos
                                               ? std::string_view::npos
                                               : space - pos);
    if (!piece.empty()) {
      tokens.push_back(Token{std::string(piece), classify_script(piece)});
    }
    if (space == std::string_view::npos) break;
    pos = space + 1;
  }
  return Phrase(std::move(tokens));
}

bool is_stop_token(const Token& token) {
  const auto& t = token.text;
  if (std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return true;
  }
  return token.script == Script::kLatin && t.size() == 1;
}

PhraseCounts extract_ngrams(const std::vector<Sentence>& sentences, std::size_t n) {
  if (n < 1 || n > 3) throw std::invalid_argument("n-gram length must be 1, 2 or 3");
  PhraseCounts counts;
  for (const auto& sentence : sentences) {
    if (sentence.size() < n) continue;
    for (std::size_t i = 0; i + n <= sentence.size(); ++i) {
      const auto first = sentence.begin() + static_cast<std::ptrdiff_t>(i);
      const auto last = first + static_cast<std::ptrdiff_t>(n);
      if (std::any_of(first, last, is_stop_token)) continue;
      ++counts[Phrase(std::vector<Token>(first, last))];
    }
  }
  return counts;
}

}  // namespace censorsearch
