#pragma once

#include "signcurator/video/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace signcurator::gateway {

// Encodes an RGB image as an 8-bit truecolor PNG (filter 0 rows, zlib IDAT).
std::vector<std::uint8_t> encode_png(const video::Image& image);

// "data:image/png;base64,..." payload for an image_url content part.
std::string png_data_uri(const video::Image& image);

}  // namespace signcurator::gateway
