#include "trinket/simfeat/pair_match.hpp"

#include <cmath>

namespace trinket::sim {

PairMatch match_pair(const ProcessedImage& query, const ProcessedImage& train, const match::RansacConfig& cfg) {
  PairMatch pm;
  pm.query_kp_count = static_cast<int>(query.keypoints.size());
  auto matches = match::match_bruteforce(query.descriptors, train.descriptors);
  pm.pre_ransac_matches = static_cast<int>(matches.size());
  if (matches.size() < 4) return pm;

  auto filtered = match::filter_matches(matches, query.keypoints, train.keypoints, cfg,
                                        match::match_seed(query.descriptors, train.descriptors));
  pm.inliers = std::move(filtered.inliers);
  pm.homography = filtered.homography;
  if (pm.inliers.empty()) return pm;

  pm.similarity = static_cast<double>(pm.inliers.size()) / pm.query_kp_count;

  std::vector<match::Point2> qp, tp;
  for (const auto& m : pm.inliers) {
    const auto& a = query.keypoints[m.query_idx];
    const auto& b = train.keypoints[m.train_idx];
    qp.push_back({a.x, a.y});
    tp.push_back({b.x, b.y});
  }
  pm.dtc_mkp_query = mean_distance_to_centroid(qp);
  pm.dtc_mkp_train = mean_distance_to_centroid(tp);

  if (!pm.homography.degenerate()) {
    const auto inv = pm.homography.inverse();
    double sum = 0;
    for (std::size_t i = 0; i < qp.size(); ++i) sum += match::symmetric_transfer_error(pm.homography, inv, qp[i], tp[i]);
    pm.mean_reproj_error = sum / static_cast<double>(qp.size());
  }
  return pm;
}

double similarity(const ProcessedImage& c, const ProcessedImage& r, const match::RansacConfig& cfg) {
  return match_pair(c, r, cfg).similarity;
}

}  // namespace trinket::sim
