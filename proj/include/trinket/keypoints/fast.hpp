#pragma once

#include <array>
#include <vector>

#include "trinket/imgcore/gray_image.hpp"
#include "trinket/keypoints/keypoint.hpp"

namespace trinket::kp {

struct PixelPos {
  int x = 0;
  int y = 0;
  friend bool operator==(const PixelPos&, const PixelPos&) = default;
};

/// The 16-pixel Bresenham circle of radius 3, clockwise from 12 o'clock.
inline constexpr std::array<PixelPos, 16> kFastCircle = {{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3},
}};

inline constexpr int kFastArc = 9;

/// FAST-9 test at every pixel at least 3 px from the border, before any
/// suppression. Returned in raster order.
std::vector<PixelPos> detect_fast_candidates(const img::GrayImage& img, int threshold);

/// Harris corner measure over a 7x7 block of Sobel derivatives (k = 0.04),
/// normalized so that scores are comparable across images. May be negative.
float harris_response(const img::GrayImage& img, int x, int y);

/// FAST-9 candidates, scored by Harris response, with 3x3 non-maximum
/// suppression. Keypoints are single scale and unoriented. Throws
/// DegenerateImage for images smaller than 7x7.
std::vector<Keypoint> detect_fast(const img::GrayImage& img, int threshold);

}  // namespace trinket::kp
