#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/error.hpp"
#include "signcurator/video/frames.hpp"
#include "signcurator/video/image.hpp"

#include "../support/fake_media.hpp"
#include "../support/tempdir.hpp"

#include <doctest.h>

#include <random>
#include <string>
#include <vector>

namespace sc = signcurator;
using sc::video::Image;

namespace {

Image make_image(int w, int h, std::vector<std::uint8_t> rgb) {
  Image img;
  img.width = w;
  img.height = h;
  img.rgb = std::move(rgb);
  return img;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("normalize_frame bilinear values match hand computation") {
  // 2x1 black/white image; half-pixel-center mapping gives these columns.
  const auto out =
      sc::video::normalize_frame(make_image(2, 1, {0, 0, 0, 255, 255, 255}));
  CHECK(out.width == 224);
  CHECK(out.height == 224);
  REQUIRE(out.rgb.size() == 224u * 224u * 3u);
  const auto red_at = [&](int x, int y) {
    return out.rgb[(static_cast<std::size_t>(y) * 224 + x) * 3];
  };
  CHECK(red_at(0, 0) == 0);
  CHECK(red_at(111, 0) == 126);
  CHECK(red_at(112, 0) == 129);
  CHECK(red_at(223, 0) == 255);
  // Height-1 source: every row is identical.
  CHECK(red_at(0, 223) == 0);
  CHECK(red_at(223, 117) == 255);
  // Monotone gradient source stays monotone.
  for (int x = 1; x < 224; ++x) {
    CHECK(red_at(x - 1, 50) <= red_at(x, 50));
  }
}

TEST_CASE("normalize_frame passes a 224x224 image through byte-identically") {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> byte(0, 255);
  std::vector<std::uint8_t> rgb(224u * 224u * 3u);
  for (auto& b : rgb) {
    b = static_cast<std::uint8_t>(byte(rng));
  }
  const auto img = make_image(224, 224, rgb);
  const auto out = sc::video::normalize_frame(img);
  CHECK(out.rgb == img.rgb);
}

TEST_CASE("normalize_frame keeps constant images constant") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> dim(1, 40);
  std::uniform_int_distribution<int> byte(0, 255);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = dim(rng);
    const int h = dim(rng);
    const std::uint8_t r = static_cast<std::uint8_t>(byte(rng));
    const std::uint8_t g = static_cast<std::uint8_t>(byte(rng));
    const std::uint8_t b = static_cast<std::uint8_t>(byte(rng));
    std::vector<std::uint8_t> rgb;
    for (int i = 0; i < w * h; ++i) {
      rgb.push_back(r);
      rgb.push_back(g);
      rgb.push_back(b);
    }
    const auto out = sc::video::normalize_frame(make_image(w, h, rgb));
    bool constant = true;
    for (std::size_t i = 0; i < out.rgb.size(); i += 3) {
      constant = constant && out.rgb[i] == r && out.rgb[i + 1] == g &&
                 out.rgb[i + 2] == b;
    }
    CHECK(constant);
  }
}

TEST_CASE("normalize_frame rejects malformed images") {
  CHECK_THROWS_AS(sc::video::normalize_frame(make_image(0, 5, {})),
                  sc::MediaError);
  CHECK_THROWS_AS(sc::video::normalize_frame(make_image(2, 1, {0, 0, 0})),
                  sc::MediaError);
}

TEST_CASE("parse_pnm") {
  SUBCASE("P6 with comments") {
    const std::string doc = "P6 # raw RGB\n# another comment\n2 1\n255\n" +
                            std::string("\x01\x02\x03\xfa\xfb\xfc", 6);
    const auto img = sc::video::parse_pnm(bytes_of(doc));
    CHECK(img.width == 2);
    CHECK(img.height == 1);
    CHECK(img.rgb == std::vector<std::uint8_t>{1, 2, 3, 0xfa, 0xfb, 0xfc});
  }
  SUBCASE("P5 expands gray to RGB") {
    const std::string doc = "P5\n2 1\n255\n" + std::string("\x40\x80", 2);
    const auto img = sc::video::parse_pnm(bytes_of(doc));
    CHECK(img.rgb ==
          std::vector<std::uint8_t>{0x40, 0x40, 0x40, 0x80, 0x80, 0x80});
  }
  SUBCASE("malformed documents raise MediaError") {
    for (const std::string doc :
         {std::string("P3\n1 1\n255\nxx"), std::string("P6\n0 1\n255\n"),
          std::string("P6\n1 1\n65535\n..."), std::string("P6\n1 1\n255"),
          std::string("P6\n1 1\n255\n\x01\x02"), std::string("P6\nx 1\n255\n"),
          std::string("")}) {
      CHECK_THROWS_AS(sc::video::parse_pnm(bytes_of(doc)), sc::MediaError);
    }
  }
}

TEST_CASE("content_digest matches sha256") {
  CHECK(sc::video::content_digest(std::string("abc")) == sc::sha256_hex("abc"));
}

TEST_CASE("plan_frame_samples midpoint schedule") {
  SUBCASE("whole seconds at 1 Hz") {
    const auto plan = sc::video::plan_frame_samples(10.0, 1.0, 32);
    REQUIRE(plan.timestamps_s.size() == 10);
    for (int k = 0; k < 10; ++k) {
      CHECK(plan.timestamps_s[k] == doctest::Approx(k + 0.5));
    }
    CHECK(plan.source_duration_s == 10.0);
    CHECK(plan.target_width == 224);
    CHECK(plan.target_height == 224);
  }
  SUBCASE("short video gets one midpoint sample") {
    const auto plan = sc::video::plan_frame_samples(0.4, 1.0, 32);
    REQUIRE(plan.timestamps_s.size() == 1);
    CHECK(plan.timestamps_s[0] == doctest::Approx(0.2));
  }
  SUBCASE("trailing partial segment is sampled at its own midpoint") {
    const auto plan = sc::video::plan_frame_samples(9.2, 1.0, 32);
    REQUIRE(plan.timestamps_s.size() == 10);
    CHECK(plan.timestamps_s[8] == doctest::Approx(8.5));
    CHECK(plan.timestamps_s[9] == doctest::Approx((9.0 + 9.2) / 2.0));
  }
  SUBCASE("over the cap the schedule spreads evenly") {
    const auto plan = sc::video::plan_frame_samples(100.0, 1.0, 32);
    REQUIRE(plan.timestamps_s.size() == 32);
    CHECK(plan.timestamps_s[0] == doctest::Approx(0.5 * 100.0 / 32.0));
    CHECK(plan.timestamps_s[31] == doctest::Approx(31.5 * 100.0 / 32.0));
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(sc::video::plan_frame_samples(0.0, 1.0, 32),
                    sc::MediaError);
    CHECK_THROWS_AS(sc::video::plan_frame_samples(-3.0, 1.0, 32),
                    sc::MediaError);
    CHECK_THROWS_AS(sc::video::plan_frame_samples(5.0, 0.0, 32),
                    sc::ConfigError);
    CHECK_THROWS_AS(sc::video::plan_frame_samples(5.0, 1.0, 0),
                    sc::ConfigError);
  }
  SUBCASE("timestamps are strictly ascending and inside the video") {
    std::mt19937 rng(20260815);
    std::uniform_real_distribution<double> duration(0.05, 400.0);
    std::uniform_real_distribution<double> rate(0.1, 4.0);
    std::uniform_int_distribution<int> cap(1, 64);
    for (int trial = 0; trial < 200; ++trial) {
      const double d = duration(rng);
      const double r = rate(rng);
      const int m = cap(rng);
      const auto plan = sc::video::plan_frame_samples(d, r, m);
      const std::size_t wanted =
          static_cast<std::size_t>(std::ceil(d * r));
      CHECK(plan.timestamps_s.size() ==
            std::min<std::size_t>(wanted, static_cast<std::size_t>(m)));
      REQUIRE(!plan.timestamps_s.empty());
      CHECK(plan.timestamps_s.front() >= 0.0);
      CHECK(plan.timestamps_s.back() < d);
      for (std::size_t i = 1; i < plan.timestamps_s.size(); ++i) {
        CHECK(plan.timestamps_s[i - 1] < plan.timestamps_s[i]);
      }
    }
  }
}

TEST_CASE("decode_frames drives the decoder command") {
  testsupport::TempDir dir;
  const auto media = dir.file("clip.num");
  sc::write_file_atomic(media, "7");
  const auto plan = sc::video::plan_frame_samples(3.0, 1.0, 32);

  const auto seq = sc::video::decode_frames(testsupport::fake_decoder_command(),
                                            media.string(), plan);
  REQUIRE(seq.frames.size() == 3);
  CHECK(seq.media_digest == sc::sha256_file_hex(media));
  CHECK(seq.plan.timestamps_s == plan.timestamps_s);
  for (const auto& frame : seq.frames) {
    CHECK(frame.width == 224);
    CHECK(frame.height == 224);
    CHECK(frame.rgb[0] == 7);  // scenario byte survives normalization
    CHECK(frame.rgb[1] == 0);
    CHECK(frame.rgb[2] == 0);
  }

  SUBCASE("decoder failure carries its stderr") {
    try {
      sc::video::decode_frames(testsupport::broken_decoder_command(),
                               media.string(), plan);
      FAIL("expected MediaError");
    } catch (const sc::MediaError& e) {
      CHECK(std::string(e.what()).find("status 3") != std::string::npos);
      CHECK(e.decoder_stderr().find("decoder exploded") != std::string::npos);
    }
  }
  SUBCASE("missing output frame is reported") {
    // Writes only frame_00001 regardless of how many timestamps were asked.
    const std::string lazy =
        "printf 'P6\\n1 1\\n255\\nxyz' > {outdir}/frame_00001.ppm";
    CHECK_THROWS_WITH_AS(
        sc::video::decode_frames(lazy, media.string(), plan),
        doctest::Contains("frame_00002"), sc::MediaError);
  }
  SUBCASE("unreadable media is a media error") {
    CHECK_THROWS_AS(sc::video::decode_frames(
                        testsupport::fake_decoder_command(),
                        dir.file("absent.num").string(), plan),
                    sc::MediaError);
  }
}
