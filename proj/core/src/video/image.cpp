#include "signcurator/video/image.hpp"

#include "signcurator/common/hash.hpp"
#include "signcurator/error.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>

namespace signcurator::video {

Image normalize_frame(const Image& image) {
  if (image.width <= 0 || image.height <= 0) {
    throw MediaError("cannot normalize an image with a zero dimension");
  }
  if (image.rgb.size() !=
      static_cast<std::size_t>(image.width) * image.height * 3) {
    throw MediaError("image byte count does not match its dimensions");
  }
  if (image.width == kTargetSize && image.height == kTargetSize) {
    return image;
  }
  Image out;
  out.width = kTargetSize;
  out.height = kTargetSize;
  out.rgb.resize(static_cast<std::size_t>(kTargetSize) * kTargetSize * 3);
  const double x_scale = static_cast<double>(image.width) / kTargetSize;
  const double y_scale = static_cast<double>(image.height) / kTargetSize;
  for (int dy = 0; dy < kTargetSize; ++dy) {
    // Half-pixel centers: destination pixel centers map onto source centers.
    double sy = (dy + 0.5) * y_scale - 0.5;
    sy = std::clamp(sy, 0.0, static_cast<double>(image.height - 1));
    const int y0 = static_cast<int>(std::floor(sy));
    const int y1 = std::min(y0 + 1, image.height - 1);
    const double fy = sy - y0;
    for (int dx = 0; dx < kTargetSize; ++dx) {
      double sx = (dx + 0.5) * x_scale - 0.5;
      sx = std::clamp(sx, 0.0, static_cast<double>(image.width - 1));
      const int x0 = static_cast<int>(std::floor(sx));
      const int x1 = std::min(x0 + 1, image.width - 1);
      const double fx = sx - x0;
      for (int c = 0; c < 3; ++c) {
        const auto at = [&](int x, int y) {
          return static_cast<double>(
              image.rgb[(static_cast<std::size_t>(y) * image.width + x) * 3 +
                        c]);
        };
        const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
        const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
        const double value = top * (1.0 - fy) + bottom * fy;
        out.rgb[(static_cast<std::size_t>(dy) * kTargetSize + dx) * 3 + c] =
            static_cast<std::uint8_t>(
                std::clamp(std::lround(value), 0L, 255L));
      }
    }
  }
  return out;
}

std::string content_digest(std::span<const std::uint8_t> bytes) {
  return sha256_hex(bytes);
}

std::string content_digest(const std::string& bytes) {
  return sha256_hex(bytes);
}

namespace {

// Reads the next PNM header token, skipping whitespace and '#' comments.
std::string next_token(std::span<const std::uint8_t> bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = static_cast<char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') {
        ++pos;
      }
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    token.push_back(static_cast<char>(bytes[pos]));
    ++pos;
  }
  if (token.empty()) {
    throw MediaError("truncated PNM header");
  }
  return token;
}

int parse_header_int(std::span<const std::uint8_t> bytes, std::size_t& pos,
                     const char* what) {
  const std::string token = next_token(bytes, pos);
  try {
    const int value = std::stoi(token);
    if (value <= 0) {
      throw MediaError(std::string("PNM ") + what + " must be positive");
    }
    return value;
  } catch (const std::logic_error&) {
    throw MediaError(std::string("malformed PNM ") + what + ": '" + token +
                     "'");
  }
}

}  // namespace

Image parse_pnm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  const std::string magic = next_token(bytes, pos);
  if (magic != "P6" && magic != "P5") {
    throw MediaError("unsupported raster format (expected P6 or P5): '" +
                     magic + "'");
  }
  const bool gray = magic == "P5";
  Image img;
  img.width = parse_header_int(bytes, pos, "width");
  img.height = parse_header_int(bytes, pos, "height");
  const int maxval = parse_header_int(bytes, pos, "maxval");
  if (maxval != 255) {
    throw MediaError("only 8-bit PNM is supported (maxval 255)");
  }
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw MediaError("PNM header not terminated by whitespace");
  }
  ++pos;  // single whitespace separates header from pixel data
  const std::size_t pixels =
      static_cast<std::size_t>(img.width) * img.height;
  const std::size_t expected = pixels * (gray ? 1 : 3);
  if (bytes.size() - pos < expected) {
    throw MediaError("PNM pixel data truncated");
  }
  img.rgb.resize(pixels * 3);
  if (gray) {
    for (std::size_t i = 0; i < pixels; ++i) {
      const std::uint8_t v = bytes[pos + i];
      img.rgb[i * 3] = v;
      img.rgb[i * 3 + 1] = v;
      img.rgb[i * 3 + 2] = v;
    }
  } else {
    std::copy(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
              bytes.begin() + static_cast<std::ptrdiff_t>(pos + expected),
              img.rgb.begin());
  }
  return img;
}

}  // namespace signcurator::video
