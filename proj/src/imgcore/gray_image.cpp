#include "trinket/imgcore/gray_image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trinket/common/error.hpp"

namespace trinket::img {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(width > 0 && height > 0
                                              ? static_cast<std::size_t>(width) * height
                                              : 0,
                                          fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::DegenerateImage,
                "image dimensions must be positive, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::DegenerateImage, "pixel buffer does not match dimensions");
  }
}

std::uint8_t GrayImage::clamped(int x, int y) const noexcept {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return at(x, y);
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

GrayImage to_grayscale(const RgbImage& rgb) {
  if (rgb.width <= 0 || rgb.height <= 0) {
    throw Error(ErrorCode::DegenerateImage, "RGB image has zero dimension");
  }
  const auto n = static_cast<std::size_t>(rgb.width) * rgb.height;
  if (rgb.data.size() != 3 * n) throw Error(ErrorCode::DegenerateImage, "RGB buffer size mismatch");
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = luminance(rgb.data[3 * i], rgb.data[3 * i + 1], rgb.data[3 * i + 2]);
  }
  return GrayImage(rgb.width, rgb.height, std::move(out));
}

GrayImage crop_center(const GrayImage& img, int w, int h) {
  if (w <= 0 || h <= 0) throw Error(ErrorCode::DegenerateImage, "crop target must be positive");
  if (w > img.width() || h > img.height()) {
    throw Error(ErrorCode::CropOutOfBounds,
                "cannot crop " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " to " + std::to_string(w) + "x" + std::to_string(h));
  }
  const int ox = (img.width() - w) / 2;
  const int oy = (img.height() - h) / 2;
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    auto src = img.row(oy + y).subspan(ox, w);
    out.insert(out.end(), src.begin(), src.end());
  }
  return GrayImage(w, h, std::move(out));
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += kernel[i + radius];
  }
  for (auto& k : kernel) k /= sum;

  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * img.at(reflect101(x + i, w), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<std::uint8_t> out(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp[static_cast<std::size_t>(reflect101(y + i, h)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return GrayImage(w, h, std::move(out));
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::DegenerateImage, "resize target must be positive");
  if (width == img.width() && height == img.height()) return img;
  const double sx = static_cast<double>(img.width()) / width;
  const double sy = static_cast<double>(img.height()) / height;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, img.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, img.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, img.width() - 1);
      const double wx = fx - x0;
      const double top = (1 - wx) * img.at(x0, y0) + wx * img.at(x1, y0);
      const double bot = (1 - wx) * img.at(x0, y1) + wx * img.at(x1, y1);
      out[static_cast<std::size_t>(y) * width + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround((1 - wy) * top + wy * bot), 0L, 255L));
    }
  }
  return GrayImage(width, height, std::move(out));
}

}  // namespace trinket::img
