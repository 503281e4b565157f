#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace signcurator::video {

inline constexpr int kTargetSize = 224;

// Raw interleaved 8-bit RGB.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // width * height * 3 bytes, row-major
};

// Bilinear stretch to exactly 224x224 (aspect ratio not preserved).
// A 224x224 input passes through byte-identically. Zero-dimension input
// raises MediaError.
Image normalize_frame(const Image& image);

// SHA-256 of the exact media bytes, lowercase hex. The cache key input.
std::string content_digest(std::span<const std::uint8_t> bytes);
std::string content_digest(const std::string& bytes);

// Parses a binary PPM (P6) or PGM (P5, expanded to gray RGB) document.
// Used to read decoder output. Malformed input raises MediaError.
Image parse_pnm(std::span<const std::uint8_t> bytes);

}  // namespace signcurator::video
