#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "trinket/imgcore/gray_image.hpp"

namespace trinket::kp {

struct EdgeMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> edge;  // 1 = edge pixel

  bool at(int x, int y) const noexcept { return edge[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t count() const noexcept;
};

/// Integer Gaussian (sigma 1.4) taps, sum 256. The smoothed image is kept at
/// 65536x scale so the whole detector runs in exact integer arithmetic.
inline constexpr std::array<int, 9> kCannyKernel = {1, 7, 26, 57, 74, 57, 26, 7, 1};
inline constexpr int kCannyKernelSum = 256;
/// tan(22.5 deg) in Q15.
inline constexpr std::int64_t kTan22Q15 = 13573;

/// Gaussian smoothing, Sobel gradients, non-maximum suppression along the
/// quantized gradient direction, and 8-connected hysteresis. Thresholds apply
/// to the L2 Sobel magnitude on the [0,255] scale: strong > high, weak > low.
/// The outermost row and column are never edges.
EdgeMap canny(const img::GrayImage& img, double low = 50.0, double high = 150.0);

}  // namespace trinket::kp
