#include "trinket/keypoints/canny.hpp"

#include <algorithm>
#include <cstdlib>

namespace trinket::kp {

std::size_t EdgeMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(edge.begin(), edge.end(), std::uint8_t{1}));
}

EdgeMap canny(const img::GrayImage& image, double low, double high) {
  const int w = image.width();
  const int h = image.height();
  const auto idx = [w](int x, int y) { return static_cast<std::size_t>(y) * w + x; };
  constexpr int r = static_cast<int>(kCannyKernel.size()) / 2;

  std::vector<std::int32_t> horiz(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t acc = 0;
      for (int i = -r; i <= r; ++i) acc += kCannyKernel[i + r] * image.at(img::reflect101(x + i, w), y);
      horiz[idx(x, y)] = acc;
    }
  }
  std::vector<std::int32_t> smooth(horiz.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      std::int32_t acc = 0;
      for (int i = -r; i <= r; ++i) acc += kCannyKernel[i + r] * horiz[idx(x, img::reflect101(y + i, h))];
      smooth[idx(x, y)] = acc;
    }
  }

  std::vector<std::int64_t> gx(smooth.size()), gy(smooth.size()), mag2(smooth.size());
  for (int y = 0; y < h; ++y) {
    const int ym = img::reflect101(y - 1, h), yp = img::reflect101(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xm = img::reflect101(x - 1, w), xp = img::reflect101(x + 1, w);
      const std::int64_t dx = (std::int64_t{smooth[idx(xp, ym)]} + 2 * std::int64_t{smooth[idx(xp, y)]} + smooth[idx(xp, yp)]) -
                              (std::int64_t{smooth[idx(xm, ym)]} + 2 * std::int64_t{smooth[idx(xm, y)]} + smooth[idx(xm, yp)]);
      const std::int64_t dy = (std::int64_t{smooth[idx(xm, yp)]} + 2 * std::int64_t{smooth[idx(x, yp)]} + smooth[idx(xp, yp)]) -
                              (std::int64_t{smooth[idx(xm, ym)]} + 2 * std::int64_t{smooth[idx(x, ym)]} + smooth[idx(xp, ym)]);
      gx[idx(x, y)] = dx;
      gy[idx(x, y)] = dy;
      mag2[idx(x, y)] = dx * dx + dy * dy;
    }
  }

  constexpr double scale = static_cast<double>(kCannyKernelSum) * kCannyKernelSum;
  const double low2 = (low * scale) * (low * scale);
  const double high2 = (high * scale) * (high * scale);

  // 0 = suppressed, 1 = weak candidate, 2 = strong
  std::vector<std::uint8_t> state(smooth.size(), 0);
  std::vector<std::size_t> stack;
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const std::int64_t m = mag2[idx(x, y)];
      if (!(static_cast<double>(m) > low2)) continue;
      const std::int64_t ax = std::llabs(gx[idx(x, y)]);
      const std::int64_t ay = std::llabs(gy[idx(x, y)]);
      std::int64_t prev, next;
      if (ay * 32768 < ax * kTan22Q15) {
        prev = mag2[idx(x - 1, y)];
        next = mag2[idx(x + 1, y)];
      } else if (ay * 32768 > ax * (kTan22Q15 + 65536)) {
        prev = mag2[idx(x, y - 1)];
        next = mag2[idx(x, y + 1)];
      } else if ((gx[idx(x, y)] > 0) == (gy[idx(x, y)] > 0)) {
        prev = mag2[idx(x - 1, y - 1)];
        next = mag2[idx(x + 1, y + 1)];
      } else {
        prev = mag2[idx(x + 1, y - 1)];
        next = mag2[idx(x - 1, y + 1)];
      }
      if (m > prev && m >= next) {
        if (static_cast<double>(m) > high2) {
          state[idx(x, y)] = 2;
          stack.push_back(idx(x, y));
        } else {
          state[idx(x, y)] = 1;
        }
      }
    }
  }

  EdgeMap out{w, h, std::vector<std::uint8_t>(smooth.size(), 0)};
  for (auto i : stack) out.edge[i] = 1;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx, ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const auto j = idx(nx, ny);
        if (state[j] != 0 && !out.edge[j]) {
          out.edge[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return out;
}

}  // namespace trinket::kp
