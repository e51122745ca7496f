#include "censorsearch/ranking/tfidf.h"

#include <algorithm>
#include <cmath>

namespace censorsearch {

std::string_view to_string(IdfFormula formula) {
  switch (formula) {
    case IdfFormula::kSmoothedLog: return "smoothed-log";
    case IdfFormula::kSmoothedInverse: return "smoothed-inverse";
  }
  return "smoothed-log";
}

std::optional<IdfFormula> parse_idf_formula(std::string_view name) {
  if (name == "smoothed-log") return IdfFormula::kSmoothedLog;
  if (name == "smoothed-inverse") return IdfFormula::kSmoothedInverse;
  return std::nullopt;
}

double inverse_document_frequency(std::uint64_t df, std::uint64_t corpus_size,
                                  IdfFormula formula) {
  df = std::min(df, corpus_size);
  const double ratio =
      (static_cast<double>(corpus_size) + 1.0) / (static_cast<double>(df) + 1.0);
  switch (formula) {
    case IdfFormula::kSmoothedLog: return std::log(ratio) + 1.0;
    case IdfFormula::kSmoothedInverse: return ratio;
  }
  return std::log(ratio) + 1.0;
}

std::vector<ScoredPhrase> score_phrases(const PhraseCounts& counts,
                                        const CorpusFrequencyProvider& corpus,
                                        IdfFormula formula) {
  std::vector<ScoredPhrase> scored;
  scored.reserve(counts.size());
  const std::uint64_t n = corpus.corpus_size();
  for (const auto& [phrase, tf] : counts) {
    const std::uint64_t df = std::min(corpus.document_frequency(phrase), n);
    scored.push_back(ScoredPhrase{
        phrase, tf, df,
        static_cast<double>(tf) * inverse_document_frequency(df, n, formula)});
  }
  std::sort(scored.begin(), scored.end(), [](const ScoredPhrase& a, const ScoredPhrase& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.tf != b.tf) return a.tf > b.tf;
    return a.phrase.surface() < b.phrase.surface();
  });
  return scored;
}

std::vector<Phrase> select_queries(const std::vector<ScoredPhrase>& scored,
                                   std::size_t k, const std::set<Phrase>& used) {
  std::vector<Phrase> out;
  std::set<Phrase> taken;
  for (const auto& s : scored) {
    if (out.size() >= k) break;
    if (used.contains(s.phrase) || !taken.insert(s.phrase).second) continue;
    out.push_back(s.phrase);
  }
  return out;
}

}  // namespace censorsearch
