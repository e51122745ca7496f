#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace censorsearch {

using Timestamp = std::chrono::sys_seconds;

Timestamp now_seconds();

// "2017-11-11T00:00:00Z"
std::string to_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);

}  // namespace censorsearch
