#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

#include "censorsearch/ranking/corpus.h"

namespace censorsearch {
namespace {

std::optional<std::uint64_t> parse_count(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

LocalCorpus::LocalCorpus(std::uint64_t corpus_size) : corpus_size_(corpus_size) {
  if (corpus_size_ == 0) throw std::invalid_argument("corpus size must be >= 1");
}

void LocalCorpus::set(std::string surface, std::uint64_t df) {
  table_.insert_or_assign(std::move(surface), std::min(df, corpus_size_));
}

std::uint64_t LocalCorpus::document_frequency(const Phrase& phrase) const {
  const auto it = table_.find(phrase.surface());
  return it == table_.end() ? 0 : it->second;
}

LocalCorpus LocalCorpus::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read corpus file " + path.string());
  std::optional<LocalCorpus> corpus;
  std::vector<std::pair<std::string, std::uint64_t>> rows;
  std::size_t skipped = 0;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.starts_with("#N ")) {
      const auto n = parse_count(std::string_view(line).substr(3));
      if (!n || *n == 0) throw std::runtime_error("bad #N header in " + path.string());
      corpus.emplace(*n);
      continue;
    }
    if (line.front() == '#') continue;
    const auto tab = line.rfind('\t');
    const auto df = tab == std::string::npos
                        ? std::nullopt
                        : parse_count(std::string_view(line).substr(tab + 1));
    if (!df || tab == 0) {
      ++skipped;
      continue;
    }
    rows.emplace_back(line.substr(0, tab), *df);
  }
  if (!corpus) throw std::runtime_error("missing #N header in " + path.string());
  for (auto& [surface, df] : rows) corpus->set(std::move(surface), df);
  corpus->skipped_lines_ = skipped;
  return std::move(*corpus);
}

LocalCorpus LocalCorpus::from_documents(
    const std::vector<std::vector<Sentence>>& documents) {
  LocalCorpus corpus(std::max<std::uint64_t>(documents.size(), 1));
  for (const auto& doc : documents) {
    std::set<std::string> present;
    for (std::size_t n = 1; n <= 3; ++n) {
      for (const auto& [phrase, count] : extract_ngrams(doc, n)) {
        present.insert(phrase.surface());
      }
    }
    for (const auto& surface : present) ++corpus.table_[surface];
  }
  return corpus;
}

void LocalCorpus::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write corpus file " + path.string());
  out << "#N " << corpus_size_ << '\n';
  for (const auto& [surface, df] : table_) out << surface << '\t' << df << '\n';
}

}  // namespace censorsearch
