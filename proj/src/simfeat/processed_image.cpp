#include "trinket/simfeat/processed_image.hpp"

#include <cmath>

namespace trinket::sim {

double mean_distance_to_centroid(std::span<const match::Point2> points) {
  if (points.empty()) return 0.0;
  double cx = 0, cy = 0;
  for (const auto& p : points) {
    cx += p.x;
    cy += p.y;
  }
  const double n = static_cast<double>(points.size());
  cx /= n;
  cy /= n;
  double sum = 0;
  for (const auto& p : points) sum += std::hypot(p.x - cx, p.y - cy);
  return sum / n;
}

ImageStats image_stats(std::span<const kp::Keypoint> keypoints, const kp::EdgeMap& edges) {
  ImageStats s;
  std::vector<match::Point2> pts;
  pts.reserve(keypoints.size());
  for (const auto& k : keypoints) pts.push_back({k.x, k.y});
  s.kp_cnt = static_cast<double>(keypoints.size());
  s.dtc_kp = mean_distance_to_centroid(pts);

  pts.clear();
  for (int y = 0; y < edges.height; ++y)
    for (int x = 0; x < edges.width; ++x)
      if (edges.at(x, y)) pts.push_back({static_cast<double>(x), static_cast<double>(y)});
  s.white_cnt = static_cast<double>(pts.size());
  s.dtc_white = mean_distance_to_centroid(pts);
  return s;
}

ProcessedImage process_image(std::string id, const img::GrayImage& image, const PipelineConfig& cfg) {
  ProcessedImage p;
  p.id = std::move(id);
  p.width = image.width();
  p.height = image.height();
  auto orb = kp::orb_detect_and_compute(image, cfg.orb);
  p.keypoints = std::move(orb.keypoints);
  p.descriptors = std::move(orb.descriptors);
  p.stats = image_stats(p.keypoints, kp::canny(image, cfg.canny_low, cfg.canny_high));
  return p;
}

}  // namespace trinket::sim
