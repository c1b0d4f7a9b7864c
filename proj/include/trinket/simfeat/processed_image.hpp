#pragma once

#include <span>
#include <string>
#include <vector>

#include "trinket/imgcore/gray_image.hpp"
#include "trinket/keypoints/canny.hpp"
#include "trinket/keypoints/orb.hpp"
#include "trinket/matching/homography.hpp"

namespace trinket::sim {

/// Frame size all stored and compared images share.
inline constexpr int kCanonicalWidth = 270;
inline constexpr int kCanonicalHeight = 312;

/// Everything the pipeline tunes, in one place.
struct PipelineConfig {
  kp::OrbConfig orb;
  match::RansacConfig ransac;
  double canny_low = 50.0;
  double canny_high = 150.0;
};

/// Quality statistics of a single image: keypoint count and spread, edge
/// pixel count and spread. Spreads are mean Euclidean distances (pixels) to
/// the centroid, 0 for empty sets.
struct ImageStats {
  double kp_cnt = 0;
  double dtc_kp = 0;
  double white_cnt = 0;
  double dtc_white = 0;

  friend bool operator==(const ImageStats&, const ImageStats&) = default;
};

struct ProcessedImage {
  std::string id;
  int width = 0;
  int height = 0;
  std::vector<kp::Keypoint> keypoints;
  std::vector<kp::BinaryDescriptor> descriptors;
  ImageStats stats;
};

double mean_distance_to_centroid(std::span<const match::Point2> points);
ImageStats image_stats(std::span<const kp::Keypoint> keypoints, const kp::EdgeMap& edges);

/// ORB features plus cached quality statistics.
ProcessedImage process_image(std::string id, const img::GrayImage& image, const PipelineConfig& cfg = {});

}  // namespace trinket::sim
