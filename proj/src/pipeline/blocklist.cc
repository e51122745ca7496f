#include <istream>
#include <ostream>
#include <sstream>

#include "censorsearch/pipeline/pipeline.h"

namespace censorsearch {

void write_blocklist(std::ostream& out, const std::vector<BlocklistEntry>& entries) {
  for (const auto& e : entries) {
    out << e.host << '\t' << to_iso8601(e.first_seen_at) << '\t' << e.discovered_via_phrase
        << '\t' << e.source_result_url << '\t' << to_string(e.ngram_mode) << '\n';
  }
}

std::vector<BlocklistEntry> read_blocklist(std::istream& in) {
  std::vector<BlocklistEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string field;
    while (std::getline(fs, field, '\t')) fields.push_back(field);
    const auto seen = fields.size() == 5 ? parse_iso8601(fields[1]) : std::nullopt;
    const auto mode = fields.size() == 5 ? parse_ngram_mode(fields[4]) : std::nullopt;
    if (!seen || !mode) {
      throw std::invalid_argument("malformed blocklist line " + std::to_string(line_no));
    }
    entries.push_back({fields[0], *seen, fields[2], fields[3], *mode});
  }
  return entries;
}

}  // namespace censorsearch
