#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace trinket::img {

/// 8-bit luminance raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  /// Throws DegenerateImage for zero dimensions.
  GrayImage(int width, int height, std::uint8_t fill = 0);
  /// Throws DegenerateImage for zero dimensions or a size mismatch.
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return data_.empty(); }

  std::uint8_t at(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  /// Border-clamped read.
  std::uint8_t clamped(int x, int y) const noexcept;

  std::span<const std::uint8_t> row(int y) const noexcept {
    return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
  }
  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Interleaved 8-bit RGB raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // r,g,b per pixel
};

/// ITU-R 601 luma, rounded and clamped.
GrayImage to_grayscale(const RgbImage& rgb);
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

/// Centered w x h sub-raster; offsets are floor((dim - target) / 2).
GrayImage crop_center(const GrayImage& img, int w, int h);

/// Separable Gaussian blur with reflect-101 borders; result rounded to 8 bits.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Bilinear resample to the given dimensions (pixel-center aligned).
GrayImage resize_bilinear(const GrayImage& img, int width, int height);

/// Reflect-101 index mapping (`dcb|abcd|cba`), valid for any n >= 1.
inline int reflect101(int i, int n) noexcept {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

}  // namespace trinket::img
