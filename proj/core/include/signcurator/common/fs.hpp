#pragma once

#include <filesystem>
#include <string>

namespace signcurator {

// Whole-file read. Throws IoError if the file cannot be opened.
std::string read_file(const std::filesystem::path& path);

// Write-temp-then-rename so readers never observe a partial file.
// Creates parent directories as needed. Throws IoError on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Append one line (content + '\n'), creating the file if absent.
void append_line(const std::filesystem::path& path, std::string_view content);

}  // namespace signcurator
