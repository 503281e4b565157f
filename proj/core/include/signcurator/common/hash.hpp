#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace signcurator {

// SHA-256 of the exact input bytes, lowercase hex (64 chars).
std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// SHA-256 of a file's contents, streamed. Throws IoError if unreadable.
std::string sha256_file_hex(const std::filesystem::path& path);

}  // namespace signcurator
