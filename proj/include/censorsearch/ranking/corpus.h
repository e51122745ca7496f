#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "censorsearch/phrase/ngram.h"

namespace censorsearch {

// Background corpus statistics: document frequency per phrase and the total
// number of documents. Implementations guarantee 0 <= df <= corpus_size and
// corpus_size >= 1. Phrases the corpus has never seen report df = 0.
class CorpusFrequencyProvider {
 public:
  virtual ~CorpusFrequencyProvider() = default;
  virtual std::uint64_t document_frequency(const Phrase& phrase) const = 0;
  virtual std::uint64_t corpus_size() const = 0;
};

// Frequency table held in memory.
//
// File format (UTF-8):
//   #N <corpus_size>
//   <phrase surface>\t<document frequency>
//   ...
// Other '#' lines are comments. Frequencies above N are clamped to N.
class LocalCorpus : public CorpusFrequencyProvider {
 public:
  explicit LocalCorpus(std::uint64_t corpus_size);

  // Throws std::runtime_error if the file is unreadable or lacks the #N
  // header. Malformed rows are skipped and counted.
  static LocalCorpus load(const std::filesystem::path& path);

  // Document frequencies of every 1-, 2- and 3-gram across `documents`.
  static LocalCorpus from_documents(const std::vector<std::vector<Sentence>>& documents);

  void set(std::string surface, std::uint64_t df);
  void save(const std::filesystem::path& path) const;

  std::uint64_t document_frequency(const Phrase& phrase) const override;
  std::uint64_t corpus_size() const override { return corpus_size_; }
  std::size_t skipped_lines() const { return skipped_lines_; }
  std::size_t entries() const { return table_.size(); }

 private:
  std::uint64_t corpus_size_;
  std::map<std::string, std::uint64_t> table_;
  std::size_t skipped_lines_ = 0;
};

// Looks phrases up on a phrase-frequency web service. The phrase goes out
// URL-encoded as one query parameter and the first integer in the response
// body is taken as its document frequency. Answers are cached in memory and
// appended to an on-disk TSV cache. Failures yield df = 0 and a warning and
// are not cached.
class RemoteCorpusClient : public CorpusFrequencyProvider {
 public:
  struct Options {
    std::string endpoint;  // e.g. "https://phrases.example/api/frequency"
    std::string query_param = "q";
    std::map<std::string, std::string> extra_params;
    std::uint64_t corpus_size = 1;
    std::filesystem::path cache_path;  // empty: no disk cache
    std::chrono::duration<double> timeout{10.0};
  };

  explicit RemoteCorpusClient(Options options);

  std::uint64_t document_frequency(const Phrase& phrase) const override;
  std::uint64_t corpus_size() const override { return options_.corpus_size; }
  std::size_t remote_lookups() const;

 private:
  std::optional<std::uint64_t> query(const std::string& surface) const;

  Options options_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::uint64_t> cache_;
  mutable std::size_t remote_lookups_ = 0;
};

}  // namespace censorsearch
