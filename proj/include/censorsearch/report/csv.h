#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace censorsearch::csv {

// RFC 4180: fields holding a comma, quote, CR or LF are quoted, with inner
// quotes doubled. Rows end in CRLF.
std::string escape(std::string_view field);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

// Inverse of write_row over a whole document. Accepts LF or CRLF row ends.
// Throws std::invalid_argument on an unterminated quoted field.
std::vector<std::vector<std::string>> parse(std::string_view text);

}  // namespace censorsearch::csv
