#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace signcurator {

using Timestamp = std::chrono::system_clock::time_point;

// RFC 3339 in UTC with seconds precision, e.g. "2025-03-14T09:26:53Z".
std::string to_rfc3339(Timestamp t);

// Accepts 'Z' or numeric offsets and ignores fractional seconds.
// Throws ParseError on malformed input.
Timestamp parse_rfc3339(std::string_view text);

}  // namespace signcurator
