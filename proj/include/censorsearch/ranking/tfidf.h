#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "censorsearch/phrase/ngram.h"
#include "censorsearch/ranking/corpus.h"

namespace censorsearch {

enum class IdfFormula {
  // ln((N + 1) / (df + 1)) + 1
  kSmoothedLog,
  // (N + 1) / (df + 1)
  kSmoothedInverse,
};

std::string_view to_string(IdfFormula formula);
std::optional<IdfFormula> parse_idf_formula(std::string_view name);

// Always positive. df is clamped to corpus_size.
double inverse_document_frequency(std::uint64_t df, std::uint64_t corpus_size,
                                  IdfFormula formula = IdfFormula::kSmoothedLog);

struct ScoredPhrase {
  Phrase phrase;
  std::size_t tf = 0;
  std::uint64_t df = 0;
  double score = 0.0;
};

// score = tf * idf(df). Sorted by score descending, then tf descending, then
// surface ascending, so the order is fully determined by the input.
std::vector<ScoredPhrase> score_phrases(const PhraseCounts& counts,
                                        const CorpusFrequencyProvider& corpus,
                                        IdfFormula formula = IdfFormula::kSmoothedLog);

// Top k phrases, in score order, that are not in `used`.
std::vector<Phrase> select_queries(const std::vector<ScoredPhrase>& scored,
                                   std::size_t k, const std::set<Phrase>& used);

}  // namespace censorsearch
