#include "signcurator/gateway/png.hpp"

#include "signcurator/common/base64.hpp"
#include "signcurator/error.hpp"

#include <zlib.h>

#include <array>
#include <cstring>

namespace signcurator::gateway {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::uint8_t* data, std::size_t size) {
  put_u32(out, static_cast<std::uint32_t>(size));
  const std::size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + size);
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + type_pos, static_cast<uInt>(4 + size));
  put_u32(out, crc);
}

}  // namespace

std::vector<std::uint8_t> encode_png(const video::Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() !=
          static_cast<std::size_t>(image.width) * image.height * 3) {
    throw MediaError("cannot encode a malformed image");
  }
  std::vector<std::uint8_t> out;
  static const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G',
                                            '\r', '\n', 0x1a, '\n'};
  out.insert(out.end(), signature, signature + 8);

  std::array<std::uint8_t, 13> ihdr{};
  const auto w = static_cast<std::uint32_t>(image.width);
  const auto h = static_cast<std::uint32_t>(image.height);
  ihdr[0] = (w >> 24) & 0xff;
  ihdr[1] = (w >> 16) & 0xff;
  ihdr[2] = (w >> 8) & 0xff;
  ihdr[3] = w & 0xff;
  ihdr[4] = (h >> 24) & 0xff;
  ihdr[5] = (h >> 16) & 0xff;
  ihdr[6] = (h >> 8) & 0xff;
  ihdr[7] = h & 0xff;
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // color type: truecolor
  ihdr[10] = 0;  // compression
  ihdr[11] = 0;  // filter
  ihdr[12] = 0;  // interlace
  put_chunk(out, "IHDR", ihdr.data(), ihdr.size());

  // Raw scanlines, each prefixed with filter type 0.
  const std::size_t stride = static_cast<std::size_t>(image.width) * 3;
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * image.height);
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);
    raw.insert(raw.end(), image.rgb.begin() + static_cast<std::ptrdiff_t>(y * stride),
               image.rgb.begin() + static_cast<std::ptrdiff_t>((y + 1) * stride));
  }
  uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(compressed_size);
  if (compress2(compressed.data(), &compressed_size, raw.data(),
                static_cast<uLong>(raw.size()), Z_BEST_SPEED) != Z_OK) {
    throw Error("zlib compression failed while encoding PNG");
  }
  put_chunk(out, "IDAT", compressed.data(), compressed_size);
  put_chunk(out, "IEND", nullptr, 0);
  return out;
}

std::string png_data_uri(const video::Image& image) {
  const auto png = encode_png(image);
  return "data:image/png;base64," +
         base64_encode(std::span<const std::uint8_t>(png.data(), png.size()));
}

}  // namespace signcurator::gateway
