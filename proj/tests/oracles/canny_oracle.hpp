#pragma once

// Direct (non-separable) Canny reference: 9x9 integer Gaussian, Sobel,
// quantized-direction suppression, and hysteresis by repeated sweeps until
// nothing changes.

#include <cstdint>
#include <cstdlib>
#include <vector>

#include "trinket/imgcore/gray_image.hpp"

namespace trinket::oracle {

inline int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

inline std::vector<std::uint8_t> canny_bruteforce(const img::GrayImage& im, double low, double high) {
  static const int k[9] = {1, 7, 26, 57, 74, 57, 26, 7, 1};
  const int w = im.width(), h = im.height();
  auto at = [w](auto& v, int x, int y) -> auto& { return v[static_cast<std::size_t>(y) * w + x]; };

  std::vector<std::int64_t> s(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::int64_t acc = 0;
      for (int j = -4; j <= 4; ++j)
        for (int i = -4; i <= 4; ++i) acc += std::int64_t{k[j + 4]} * k[i + 4] * im.at(reflect(x + i, w), reflect(y + j, h));
      at(s, x, y) = acc;
    }

  std::vector<std::int64_t> gx(s.size()), gy(s.size()), m(s.size());
  static const int sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
  static const int sy[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      std::int64_t ax = 0, ay = 0;
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i) {
          const auto v = at(s, reflect(x + i, w), reflect(y + j, h));
          ax += sx[j + 1][i + 1] * v;
          ay += sy[j + 1][i + 1] * v;
        }
      at(gx, x, y) = ax;
      at(gy, x, y) = ay;
      at(m, x, y) = ax * ax + ay * ay;
    }

  const double lo = low * 65536.0, hi = high * 65536.0;
  std::vector<int> cls(s.size(), 0);  // 0 none, 1 weak, 2 strong
  for (int y = 1; y < h - 1; ++y)
    for (int x = 1; x < w - 1; ++x) {
      const auto mag = at(m, x, y);
      if (!(static_cast<double>(mag) > lo * lo)) continue;
      const auto ax = std::llabs(at(gx, x, y)), ay = std::llabs(at(gy, x, y));
      int dx1, dy1;  // "previous" neighbour offset; the other is its mirror
      if (32768 * ay < 13573 * ax) {
        dx1 = -1; dy1 = 0;
      } else if (32768 * ay > (13573 + 65536) * ax) {
        dx1 = 0; dy1 = -1;
      } else if ((at(gx, x, y) > 0) == (at(gy, x, y) > 0)) {
        dx1 = -1; dy1 = -1;
      } else {
        dx1 = 1; dy1 = -1;
      }
      const bool keep = mag > at(m, x + dx1, y + dy1) && mag >= at(m, x - dx1, y - dy1);
      if (keep) at(cls, x, y) = static_cast<double>(mag) > hi * hi ? 2 : 1;
    }

  std::vector<std::uint8_t> edge(s.size(), 0);
  for (std::size_t i = 0; i < cls.size(); ++i) edge[i] = cls[i] == 2;
  for (bool changed = true; changed;) {
    changed = false;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (at(cls, x, y) != 1 || at(edge, x, y)) continue;
        for (int j = -1; j <= 1; ++j)
          for (int i = -1; i <= 1; ++i) {
            const int nx = x + i, ny = y + j;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (at(edge, nx, ny)) {
              at(edge, x, y) = 1;
              changed = true;
            }
          }
      }
  }
  return edge;
}

}  // namespace trinket::oracle
