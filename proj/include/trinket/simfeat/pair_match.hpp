#pragma once

#include <vector>

#include "trinket/matching/homography.hpp"
#include "trinket/matching/matcher.hpp"
#include "trinket/simfeat/processed_image.hpp"

namespace trinket::sim {

/// Outcome of matching a candidate (query) image against one reference (train)
/// image: cross-checked matches, RANSAC inliers and the derived scalars.
struct PairMatch {
  int query_kp_count = 0;
  int pre_ransac_matches = 0;
  std::vector<match::Match> inliers;
  match::Homography homography;
  double similarity = 0;         // |inliers| / |kp(query)|
  double mean_reproj_error = 0;  // over inliers, symmetric transfer error
  double dtc_mkp_query = 0;      // spread of the query's inlier keypoints
  double dtc_mkp_train = 0;      // spread of the train image's inlier keypoints
};

PairMatch match_pair(const ProcessedImage& query, const ProcessedImage& train, const match::RansacConfig& cfg = {});

/// Sim(C, R): RANSAC inliers over the number of keypoints in C; 0 when C has
/// no keypoints or fewer than 4 matches survive cross-checking.
double similarity(const ProcessedImage& c, const ProcessedImage& r, const match::RansacConfig& cfg = {});

}  // namespace trinket::sim
