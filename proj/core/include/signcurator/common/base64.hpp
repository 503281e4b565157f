#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signcurator {

std::string base64_encode(std::span<const std::uint8_t> bytes);

// Strict decoder (standard alphabet, '=' padding). Throws ParseError on any
// other character or bad padding.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace signcurator
