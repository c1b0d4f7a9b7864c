#include "trinket/imgcore/pyramid.hpp"

#include <cmath>
#include <string>

#include "trinket/common/error.hpp"

namespace trinket::img {

int pyramid_level_size(int dim, double scale_factor, int level) {
  return static_cast<int>(std::floor(dim / std::pow(scale_factor, level) + 1e-9));
}

int max_pyramid_levels(int width, int height, double scale_factor) {
  int n = 0;
  while (pyramid_level_size(width, scale_factor, n) >= kMinPyramidSide &&
         pyramid_level_size(height, scale_factor, n) >= kMinPyramidSide) {
    ++n;
  }
  return n;
}

Pyramid build_pyramid(const GrayImage& img, int n_levels, double scale_factor) {
  if (n_levels < 1) throw Error(ErrorCode::PyramidTooDeep, "n_levels must be >= 1");
  if (!(scale_factor > 1.0)) throw Error(ErrorCode::PyramidTooDeep, "scale_factor must be > 1");
  if (n_levels > max_pyramid_levels(img.width(), img.height(), scale_factor)) {
    throw Error(ErrorCode::PyramidTooDeep,
                std::to_string(n_levels) + " levels at factor " + std::to_string(scale_factor) +
                    " shrink a " + std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " image below 16x16");
  }
  Pyramid pyr;
  pyr.scale_factor = scale_factor;
  pyr.levels.reserve(n_levels);
  pyr.levels.push_back(img);
  for (int i = 1; i < n_levels; ++i) {
    const GrayImage& prev = pyr.levels.back();
    const int w = pyramid_level_size(img.width(), scale_factor, i);
    const int h = pyramid_level_size(img.height(), scale_factor, i);
    const double step = static_cast<double>(prev.width()) / w;
    pyr.levels.push_back(resize_bilinear(gaussian_blur(prev, 0.5 * step), w, h));
  }
  return pyr;
}

}  // namespace trinket::img
