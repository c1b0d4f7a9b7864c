#include "trinket/keypoints/orb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "trinket/common/error.hpp"
#include "trinket/imgcore/pyramid.hpp"
#include "trinket/keypoints/fast.hpp"

namespace trinket::kp {
namespace {

// Generated at build time from data/brief_pattern.bin.
constexpr std::uint8_t kPatternBytes[] = {
#include "brief_pattern_data.inc"
};
static_assert(sizeof(kPatternBytes) == 256 * 4, "brief pattern must hold 256 records");

constexpr int kAngleBins = 30;

struct PatternTable {
  std::array<SamplePair, 256> base{};
  std::array<std::array<SamplePair, 256>, kAngleBins> steered{};

  PatternTable() {
    for (int i = 0; i < 256; ++i) {
      base[i] = {static_cast<std::int8_t>(kPatternBytes[4 * i]), static_cast<std::int8_t>(kPatternBytes[4 * i + 1]),
                 static_cast<std::int8_t>(kPatternBytes[4 * i + 2]), static_cast<std::int8_t>(kPatternBytes[4 * i + 3])};
    }
    for (int bin = 0; bin < kAngleBins; ++bin) {
      const double a = bin * kAngleStepDegrees * std::numbers::pi / 180.0;
      const double c = std::cos(a), s = std::sin(a);
      auto rot = [&](int x, int y, std::int8_t& ox, std::int8_t& oy) {
        ox = static_cast<std::int8_t>(std::lround(x * c - y * s));
        oy = static_cast<std::int8_t>(std::lround(x * s + y * c));
      };
      for (int i = 0; i < 256; ++i) {
        auto& o = steered[bin][i];
        rot(base[i].x1, base[i].y1, o.x1, o.y1);
        rot(base[i].x2, base[i].y2, o.x2, o.y2);
      }
    }
  }
};

const PatternTable& pattern_table() {
  static const PatternTable table;
  return table;
}

// Half-widths of the radius-15 disk per row offset.
const std::array<int, kPatchRadius + 1>& disk_extent() {
  static const auto ext = [] {
    std::array<int, kPatchRadius + 1> e{};
    for (int dy = 0; dy <= kPatchRadius; ++dy) {
      int dx = 0;
      while ((dx + 1) * (dx + 1) + dy * dy <= kPatchRadius * kPatchRadius) ++dx;
      e[dy] = dx;
    }
    return e;
  }();
  return ext;
}

bool fits(const img::GrayImage& img, int cx, int cy, int border) {
  return cx - border >= 0 && cy - border >= 0 && cx + border < img.width() && cy + border < img.height();
}

struct Candidate {
  int level;
  int x, y;
  float raw_score;
};

}  // namespace

std::span<const SamplePair, 256> brief_pattern() { return pattern_table().base; }

float compute_orientation(const img::GrayImage& img, const Keypoint& kp) {
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  if (!fits(img, cx, cy, kPatchRadius)) {
    throw Error(ErrorCode::KeypointNearBorder, "orientation patch leaves the image");
  }
  const auto& ext = disk_extent();
  long long m10 = 0, m01 = 0;
  for (int dy = -kPatchRadius; dy <= kPatchRadius; ++dy) {
    const int half = ext[std::abs(dy)];
    for (int dx = -half; dx <= half; ++dx) {
      const int v = img.at(cx + dx, cy + dy);
      m10 += static_cast<long long>(dx) * v;
      m01 += static_cast<long long>(dy) * v;
    }
  }
  if (m10 == 0 && m01 == 0) return 0.f;
  double deg = std::atan2(static_cast<double>(m01), static_cast<double>(m10)) * 180.0 / std::numbers::pi;
  if (deg < 0) deg += 360.0;
  if (deg >= 360.0) deg -= 360.0;
  return static_cast<float>(deg);
}

BinaryDescriptor describe(const img::GrayImage& smoothed, const Keypoint& kp) {
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  if (!fits(smoothed, cx, cy, kDescriptorBorder)) {
    throw Error(ErrorCode::KeypointNearBorder, "descriptor patch leaves the image");
  }
  int bin = static_cast<int>(std::lround(kp.angle / kAngleStepDegrees)) % kAngleBins;
  if (bin < 0) bin += kAngleBins;
  const auto& pairs = pattern_table().steered[bin];
  BinaryDescriptor d;
  for (int i = 0; i < 256; ++i) {
    const auto& p = pairs[i];
    if (smoothed.at(cx + p.x1, cy + p.y1) < smoothed.at(cx + p.x2, cy + p.y2)) d.set(i);
  }
  return d;
}

OrbFeatures orb_detect_and_compute(const img::GrayImage& image, const OrbConfig& cfg) {
  OrbFeatures out;
  if (cfg.max_keypoints < 1) return out;

  // A level is only useful when something survives the descriptor border.
  int levels = std::min(cfg.n_levels, img::max_pyramid_levels(image.width(), image.height(), cfg.scale_factor));
  while (levels > 0 &&
         (img::pyramid_level_size(image.width(), cfg.scale_factor, levels - 1) <= 2 * kDescriptorBorder ||
          img::pyramid_level_size(image.height(), cfg.scale_factor, levels - 1) <= 2 * kDescriptorBorder)) {
    --levels;
  }
  if (levels == 0) return out;
  const auto pyr = img::build_pyramid(image, levels, cfg.scale_factor);

  std::vector<Candidate> cands;
  for (int l = 0; l < levels; ++l) {
    const auto& level = pyr.levels[l];
    for (const auto& k : detect_fast(level, cfg.fast_threshold)) {
      const int x = static_cast<int>(k.x), y = static_cast<int>(k.y);
      if (!fits(level, x, y, kDescriptorBorder)) continue;
      cands.push_back({l, x, y, harris_response(level, x, y)});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.raw_score != b.raw_score) return a.raw_score > b.raw_score;
    if (a.level != b.level) return a.level < b.level;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  });
  if (cands.size() > static_cast<std::size_t>(cfg.max_keypoints)) cands.resize(cfg.max_keypoints);

  std::vector<std::optional<img::GrayImage>> smoothed(levels);
  out.keypoints.reserve(cands.size());
  out.descriptors.reserve(cands.size());
  for (const auto& c : cands) {
    const auto& level = pyr.levels[c.level];
    if (!smoothed[c.level]) smoothed[c.level] = img::gaussian_blur(level, kDescriptorSmoothingSigma);
    Keypoint local;
    local.x = static_cast<float>(c.x);
    local.y = static_cast<float>(c.y);
    local.angle = compute_orientation(level, local);
    const auto desc = describe(*smoothed[c.level], local);

    const double rx = static_cast<double>(image.width()) / level.width();
    const double ry = static_cast<double>(image.height()) / level.height();
    Keypoint kp;
    kp.x = static_cast<float>(c.x * rx);
    kp.y = static_cast<float>(c.y * ry);
    kp.octave = c.level;
    kp.size = static_cast<float>(kPatchSize * std::pow(cfg.scale_factor, c.level));
    kp.angle = local.angle;
    kp.response = std::max(0.f, c.raw_score);
    out.keypoints.push_back(kp);
    out.descriptors.push_back(desc);
  }
  return out;
}

}  // namespace trinket::kp
