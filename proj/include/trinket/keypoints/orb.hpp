#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trinket/imgcore/gray_image.hpp"
#include "trinket/keypoints/keypoint.hpp"

namespace trinket::kp {

struct OrbConfig {
  int max_keypoints = 500;
  int fast_threshold = 20;
  int n_levels = 8;
  double scale_factor = 1.2;
};

inline constexpr int kPatchSize = 31;
inline constexpr int kPatchRadius = 15;
/// Keypoints closer than this to any border are dropped: the 31x31 patch
/// plus rotation padding (37x37) must fit.
inline constexpr int kDescriptorBorder = 18;
inline constexpr double kDescriptorSmoothingSigma = 2.0;
inline constexpr double kAngleStepDegrees = 12.0;

/// One BRIEF test: bit = I(p + r(a)) < I(p + r(b)).
struct SamplePair {
  std::int8_t x1, y1, x2, y2;
};

/// The frozen 256-pair sampling pattern (data/brief_pattern.bin).
std::span<const SamplePair, 256> brief_pattern();

/// Intensity-centroid orientation over the radius-15 disk around (kp.x, kp.y),
/// in degrees [0, 360). A patch with zero first moments yields 0. Throws
/// KeypointNearBorder when the disk does not fit.
float compute_orientation(const img::GrayImage& img, const Keypoint& kp);

/// Steered BRIEF on a pre-smoothed image at (kp.x, kp.y), rotated by kp.angle
/// quantized to 12 degree steps. Throws KeypointNearBorder when the padded
/// patch does not fit.
BinaryDescriptor describe(const img::GrayImage& smoothed, const Keypoint& kp);

struct OrbFeatures {
  std::vector<Keypoint> keypoints;
  std::vector<BinaryDescriptor> descriptors;
};

/// FAST over the scale pyramid, Harris ranking, top max_keypoints retained,
/// oriented and described. keypoints[i] pairs with descriptors[i]. Images too
/// small for the configured pyramid use as many levels as fit.
OrbFeatures orb_detect_and_compute(const img::GrayImage& img, const OrbConfig& cfg = {});

}  // namespace trinket::kp
