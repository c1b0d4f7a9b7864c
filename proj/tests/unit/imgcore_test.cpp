#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "support/check_error.hpp"
#include "support/images.hpp"
#include "trinket/common/error.hpp"
#include "trinket/imgcore/image_io.hpp"
#include "trinket/imgcore/pyramid.hpp"

using namespace trinket;
using img::GrayImage;
using test::code_of;

namespace {

GrayImage gradient(int w, int h) {
  GrayImage im(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) im.at(x, y) = static_cast<std::uint8_t>((x * 7 + y * 3) % 256);
  return im;
}

}  // namespace

TEST_CASE("luminance weights") {
  CHECK(img::luminance(0, 0, 0) == 0);
  CHECK(img::luminance(255, 255, 255) == 255);
  CHECK(img::luminance(255, 0, 0) == 76);  // round(0.299 * 255) = round(76.245)
  CHECK(img::luminance(0, 255, 0) == 150);
  CHECK(img::luminance(0, 0, 255) == 29);
}

TEST_CASE("grayscale is idempotent on gray pixels") {
  img::RgbImage rgb{16, 1, {}};
  for (int v = 0; v < 256; v += 17)
    for (int c = 0; c < 3; ++c) rgb.data.push_back(static_cast<std::uint8_t>(v));
  const auto g = img::to_grayscale(rgb);
  for (int x = 0; x < 16; ++x) CHECK(g.at(x, 0) == x * 17);
}

TEST_CASE("grayscale rejects empty rasters") {
  CHECK(code_of([] { img::to_grayscale(img::RgbImage{0, 4, {}}); }) == ErrorCode::DegenerateImage);
  CHECK(code_of([] { GrayImage(0, 3); }) == ErrorCode::DegenerateImage);
}

TEST_CASE("crop_center") {
  const auto src = gradient(540, 624);
  const auto c = img::crop_center(src, 270, 312);
  CHECK(c.width() == 270);
  CHECK(c.height() == 312);
  CHECK(c.at(0, 0) == src.at(135, 156));
  CHECK(c.at(269, 311) == src.at(135 + 269, 156 + 311));

  CHECK(img::crop_center(src, 540, 624) == src);
  CHECK(code_of([] { img::crop_center(GrayImage(100, 100), 101, 50); }) == ErrorCode::CropOutOfBounds);

  // Odd differences floor the offset.
  const auto odd = img::crop_center(gradient(11, 9), 4, 4);
  CHECK(odd.at(0, 0) == gradient(11, 9).at(3, 2));
}

TEST_CASE("cropping twice to the same size is identity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const int w = 20 + static_cast<int>(uniform_index(rng, 60));
    const int h = 20 + static_cast<int>(uniform_index(rng, 60));
    const int tw = 1 + static_cast<int>(uniform_index(rng, w));
    const int th = 1 + static_cast<int>(uniform_index(rng, h));
    const auto once = img::crop_center(test::noise_image(w, h, seed), tw, th);
    CHECK(img::crop_center(once, tw, th) == once);
  }
}

TEST_CASE("pyramid geometry") {
  const auto src = test::noise_image(256, 256, 3);
  SUBCASE("single level is the input") {
    const auto p = img::build_pyramid(src, 1, 1.2);
    REQUIRE(p.n_levels() == 1);
    CHECK(p.levels[0] == src);
  }
  SUBCASE("eight levels at 1.2") {
    const auto p = img::build_pyramid(src, 8, 1.2);
    REQUIRE(p.n_levels() == 8);
    CHECK(p.levels[0] == src);
    CHECK(p.levels[7].width() == 71);
    CHECK(p.levels[7].height() == 71);
    for (int i = 0; i < 8; ++i) {
      CHECK(p.levels[i].width() == static_cast<int>(std::floor(256 / std::pow(1.2, i))));
    }
  }
  SUBCASE("too deep") {
    CHECK(code_of([] { img::build_pyramid(GrayImage(20, 20), 8, 1.2); }) == ErrorCode::PyramidTooDeep);
  }
  SUBCASE("exact powers are not rounded down by float error") {
    CHECK(img::pyramid_level_size(144, 1.2, 2) == 100);
  }
}

TEST_CASE("gaussian blur preserves constants") {
  const GrayImage flat(30, 20, 77);
  CHECK(img::gaussian_blur(flat, 2.0) == flat);
}

TEST_CASE("png and pgm round trip") {
  const auto im = test::shapes_image(37, 23, 9);
  CHECK(img::decode_image(img::encode_png(im)) == im);
  CHECK(img::decode_image(img::encode_pgm(im)) == im);

  const auto dir = std::filesystem::temp_directory_path() / "trinket_imgcore_test";
  std::filesystem::create_directories(dir);
  img::write_png(im, dir / "a.png");
  CHECK(img::read_image(dir / "a.png") == im);
  std::filesystem::remove_all(dir);
}

TEST_CASE("undecodable bytes") {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK(code_of([&] { img::decode_image(junk); }) == ErrorCode::BadImage);
  const std::string truncated = "P5\n4 4\n255\nab";
  CHECK(code_of([&] {
          img::decode_image(std::span(reinterpret_cast<const std::uint8_t*>(truncated.data()), truncated.size()));
        }) == ErrorCode::BadImage);
  CHECK(code_of([] { img::read_image("/nonexistent/file.png"); }) == ErrorCode::IoError);
}
