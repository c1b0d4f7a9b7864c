#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include "trinket/simfeat/reference_set.hpp"

namespace trinket::sim {

// Frozen classifier input layout. The last five columns are the
// matched-keypoint spread features that counter master images; models trained
// without them use the first kBaseFeatureCount columns.
inline constexpr std::array<std::string_view, 33> kFeatureNames = {
    "kp_cnt_c",        "kp_cnt_t",        "match_cnt_preransac",
    "dist_min",        "dist_max",        "dist_mean",          "dist_sd",
    "size_min",        "size_max",        "size_mean",          "size_sd",
    "response_min",    "response_max",    "response_mean",      "response_sd",
    "angle_min",       "angle_max",       "angle_mean",         "angle_sd",
    "avg_ref_nn",      "avg_ref_fn",      "avg_ref_templ",
    "sim_to_template_norm", "min_sim_norm", "max_sim_norm",
    "homography_inlier_cnt", "homography_inlier_ratio", "homography_mean_reproj_err",
    "dtc_mkp_c",       "dtc_mkp_t",       "dtc_mkp_min",        "dtc_mkp_max", "dtc_mkp_mean",
};
inline constexpr std::size_t kFeatureCount = kFeatureNames.size();
inline constexpr std::size_t kDefenseFeatureCount = 5;
inline constexpr std::size_t kBaseFeatureCount = kFeatureCount - kDefenseFeatureCount;

using FeatureVector = std::array<double, kFeatureCount>;

/// Assembles the feature row from precomputed matches: `vs_members[i]` is the
/// candidate matched against refset member i.
FeatureVector extract_features(const ProcessedImage& c, const ReferenceSet& refset,
                               std::span<const PairMatch> vs_members);

FeatureVector extract_features(const ProcessedImage& c, const ReferenceSet& refset,
                               const match::RansacConfig& cfg = {});

/// "name1,...,name33,label"
std::string feature_csv_header();
std::string format_feature_row(std::span<const double> features, int label);

}  // namespace trinket::sim
