#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace censorsearch::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes the code point starting at `pos` and advances `pos` past it.
// Invalid or truncated sequences yield kReplacement and advance one byte.
char32_t next(std::string_view text, std::size_t& pos);

void append(std::string& out, char32_t cp);

std::string encode(char32_t cp);

// Replaces every invalid sequence with U+FFFD.
std::string sanitize(std::string_view bytes);

bool is_valid(std::string_view bytes);

std::vector<char32_t> decode(std::string_view text);

std::size_t length(std::string_view text);

}  // namespace censorsearch::utf8
