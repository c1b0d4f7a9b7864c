#pragma once

#include <vector>

#include "trinket/imgcore/gray_image.hpp"

namespace trinket::img {

inline constexpr int kMinPyramidSide = 16;

struct Pyramid {
  std::vector<GrayImage> levels;
  double scale_factor = 1.2;

  int n_levels() const noexcept { return static_cast<int>(levels.size()); }
};

/// floor(dim / scale_factor^level), robust to floating-point error.
int pyramid_level_size(int dim, double scale_factor, int level);

/// Number of levels that stay at or above kMinPyramidSide on both axes.
int max_pyramid_levels(int width, int height, double scale_factor);

/// Level i is the source downscaled to floor(source / scale_factor^i); each
/// level is derived from the previous one by a Gaussian pre-blur followed by a
/// bilinear resample. Throws PyramidTooDeep instead of truncating.
Pyramid build_pyramid(const GrayImage& img, int n_levels, double scale_factor);

}  // namespace trinket::img
