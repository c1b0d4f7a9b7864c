#include "trinket/keypoints/fast.hpp"

#include <algorithm>
#include <limits>

#include "trinket/common/error.hpp"

namespace trinket::kp {
namespace {

constexpr float kHarrisK = 0.04f;
constexpr int kHarrisBlock = 7;

bool has_arc(std::uint32_t mask) {
  std::uint32_t m = mask | (mask << 16);
  std::uint32_t run = m;
  for (int k = 1; k < kFastArc; ++k) run &= m >> k;
  return (run & 0xFFFFu) != 0;
}

}  // namespace

std::vector<PixelPos> detect_fast_candidates(const img::GrayImage& img, int threshold) {
  if (img.width() < 7 || img.height() < 7) {
    throw Error(ErrorCode::DegenerateImage, "FAST needs at least a 7x7 image");
  }
  const int w = img.width();
  std::array<std::ptrdiff_t, 16> offset{};
  for (int i = 0; i < 16; ++i) offset[i] = kFastCircle[i].y * w + kFastCircle[i].x;

  std::vector<PixelPos> out;
  const auto* base = img.pixels().data();
  for (int y = 3; y < img.height() - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const auto* p = base + static_cast<std::ptrdiff_t>(y) * w + x;
      const int hi = *p + threshold;
      const int lo = *p - threshold;
      int bright = 0, dark = 0;
      for (int i = 0; i < 16; i += 4) {
        bright += p[offset[i]] > hi;
        dark += p[offset[i]] < lo;
      }
      if (bright < 2 && dark < 2) continue;
      std::uint32_t bmask = 0, dmask = 0;
      for (int i = 0; i < 16; ++i) {
        const int v = p[offset[i]];
        bmask |= static_cast<std::uint32_t>(v > hi) << i;
        dmask |= static_cast<std::uint32_t>(v < lo) << i;
      }
      if (has_arc(bmask) || has_arc(dmask)) out.push_back({x, y});
    }
  }
  return out;
}

float harris_response(const img::GrayImage& img, int x, int y) {
  const int r = kHarrisBlock / 2;
  double a = 0, b = 0, c = 0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      const int px = x + dx, py = y + dy;
      const int ix = (img.clamped(px + 1, py - 1) + 2 * img.clamped(px + 1, py) + img.clamped(px + 1, py + 1)) -
                     (img.clamped(px - 1, py - 1) + 2 * img.clamped(px - 1, py) + img.clamped(px - 1, py + 1));
      const int iy = (img.clamped(px - 1, py + 1) + 2 * img.clamped(px, py + 1) + img.clamped(px + 1, py + 1)) -
                     (img.clamped(px - 1, py - 1) + 2 * img.clamped(px, py - 1) + img.clamped(px + 1, py - 1));
      a += static_cast<double>(ix) * ix;
      b += static_cast<double>(iy) * iy;
      c += static_cast<double>(ix) * iy;
    }
  }
  const double scale = 1.0 / (4.0 * kHarrisBlock * 255.0);
  const double s4 = scale * scale * scale * scale;
  return static_cast<float>((a * b - c * c - kHarrisK * (a + b) * (a + b)) * s4);
}

std::vector<Keypoint> detect_fast(const img::GrayImage& img, int threshold) {
  auto candidates = detect_fast_candidates(img, threshold);
  const int w = img.width();
  constexpr float kNone = -std::numeric_limits<float>::infinity();
  std::vector<float> score(static_cast<std::size_t>(w) * img.height(), kNone);
  for (const auto& c : candidates) score[static_cast<std::size_t>(c.y) * w + c.x] = harris_response(img, c.x, c.y);

  std::vector<Keypoint> out;
  for (const auto& c : candidates) {
    const float s = score[static_cast<std::size_t>(c.y) * w + c.x];
    bool is_max = true;
    for (int dy = -1; dy <= 1 && is_max; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const float n = score[static_cast<std::size_t>(c.y + dy) * w + (c.x + dx)];
        // Ties go to the earlier pixel in raster order.
        const bool earlier = dy < 0 || (dy == 0 && dx < 0);
        if (n > s || (n == s && earlier)) {
          is_max = false;
          break;
        }
      }
    }
    if (!is_max) continue;
    Keypoint kp;
    kp.x = static_cast<float>(c.x);
    kp.y = static_cast<float>(c.y);
    kp.response = std::max(0.f, s);
    out.push_back(kp);
  }
  return out;
}

}  // namespace trinket::kp
