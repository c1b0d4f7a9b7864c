#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "trinket/keypoints/keypoint.hpp"
#include "trinket/matching/matcher.hpp"

namespace trinket::match {

struct Point2 {
  double x = 0;
  double y = 0;
};

/// Row-major 3x3 projective map, normalized so h33 == 1.
class Homography {
 public:
  Homography() = default;
  static Homography identity();
  static Homography degenerate_marker();
  /// Normalizes by h33; yields a degenerate homography when h33 is ~0 or any
  /// entry is non-finite.
  static Homography from_matrix(const std::array<double, 9>& m);

  bool degenerate() const noexcept { return degenerate_; }
  const std::array<double, 9>& matrix() const noexcept { return m_; }
  double operator()(int r, int c) const noexcept { return m_[3 * r + c]; }

  /// Returns false when the point maps to infinity.
  bool apply(Point2 p, Point2& out) const noexcept;
  Homography inverse() const;
  double max_abs_diff(const Homography& other) const noexcept;

 private:
  std::array<double, 9> m_{1, 0, 0, 0, 1, 0, 0, 0, 1};
  bool degenerate_ = true;
};

/// sqrt((d_fwd^2 + d_bwd^2) / 2): RMS of the forward and backward transfer
/// distances, in pixels. Infinite when either transfer is undefined.
double symmetric_transfer_error(const Homography& h, const Homography& h_inv, Point2 a, Point2 b);

/// Least-squares DLT with Hartley normalization (>= 4 points).
Homography fit_homography_dlt(std::span<const Point2> a, std::span<const Point2> b);

struct RansacConfig {
  double reproj_thresh = 3.0;
  int max_iters = 1000;
  double confidence = 0.99;
};

struct RansacResult {
  Homography homography;
  std::vector<bool> inlier_mask;
  int inlier_count = 0;
};

/// Four-point hypotheses scored by symmetric transfer error, adaptive early
/// exit, final refit over all inliers. b ~ H a. Deterministic for a seed.
/// Throws NotEnoughMatches (< 4 points) or DegenerateGeometry.
RansacResult estimate_homography_ransac(std::span<const Point2> a, std::span<const Point2> b,
                                        const RansacConfig& cfg, std::uint64_t seed);

struct FilteredMatches {
  std::vector<Match> inliers;
  Homography homography;  // degenerate when fewer than 4 matches or no model
};

FilteredMatches filter_matches(std::span<const Match> matches, std::span<const kp::Keypoint> query_kps,
                               std::span<const kp::Keypoint> train_kps, const RansacConfig& cfg,
                               std::uint64_t seed);

}  // namespace trinket::match
