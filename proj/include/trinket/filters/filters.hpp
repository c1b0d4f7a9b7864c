#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trinket/common/kv_config.hpp"
#include "trinket/learn/model.hpp"
#include "trinket/simfeat/reference_set.hpp"

namespace trinket::filt {

enum class FeedbackCode { LowQualityOrPlain, NonIdenticalTrinkets, OutOfBounds };
inline constexpr std::array kAllFeedbackCodes = {FeedbackCode::LowQualityOrPlain, FeedbackCode::NonIdenticalTrinkets,
                                                 FeedbackCode::OutOfBounds};

/// "LOW_QUALITY_OR_PLAIN", "NON_IDENTICAL_TRINKETS", "OUT_OF_BOUNDS"
std::string_view code_name(FeedbackCode code);
/// User-facing English guidance; docs/feedback_codes.json mirrors this table.
std::string_view feedback_message(FeedbackCode code);

enum class RuleId {
  RefKpCnt,
  RefDtcKp,
  RefAvgCrossSim,
  CandKpCnt,
  CandDtcKp,
  CandWhiteCnt,
  CandDtcWhite,
  CbFilter,
};
std::string_view rule_name(RuleId rule);

struct Reason {
  RuleId rule;
  FeedbackCode code;
  std::string message;
};

struct FilterVerdict {
  std::vector<Reason> reasons;

  bool accepted() const noexcept { return reasons.empty(); }
  void reject(RuleId rule, FeedbackCode code);
  void merge(const FilterVerdict& other);
  /// Distinct codes in first-seen order.
  std::vector<FeedbackCode> codes() const;
};

/// Reference rules reject below a minimum, candidate bounds reject above a
/// maximum; both strict.
struct FilterRuleConfig {
  double ref_kp_cnt_min = 20;
  double ref_dtc_kp_min = 30;
  double ref_avg_cross_sim_min = 0.6;
  double cand_kp_cnt_min = 20;
  double cand_dtc_kp_max = 44600;
  double cand_white_cnt_max = 22400;
  double cand_dtc_white_max = 160;

  /// Missing keys keep their defaults; throws FormatError for non-positive
  /// or malformed values.
  static FilterRuleConfig from_kv(const KvConfig& kv);
  static FilterRuleConfig load(const std::filesystem::path& path);
  void validate() const;
};

/// KP-CNT, DTC-KP, White-CNT, DTC-White of a single image.
sim::ImageStats compute_filter_stats(const img::GrayImage& image, const sim::PipelineConfig& cfg = {});

/// Rule filter on the reference set: template keypoint count and spread,
/// average cross similarity.
FilterVerdict rbfilter_reference(const sim::ReferenceSet& refset, const FilterRuleConfig& cfg = {});
FilterVerdict rbfilter_candidate(const sim::ImageStats& stats, const FilterRuleConfig& cfg = {});
/// Rejects candidates outside the region the classifier was trained on.
FilterVerdict ubounds_candidate(const sim::ImageStats& stats, const FilterRuleConfig& cfg = {});

inline constexpr std::array<std::string_view, 19> kCbFilterFeatureNames = {
    "t_kp_cnt",      "t_dtc_kp",      "t_white_cnt",   "t_dtc_white",
    "avg_kp_cnt",    "min_kp_cnt",    "max_kp_cnt",
    "avg_dtc_kp",    "min_dtc_kp",    "max_dtc_kp",
    "avg_white_cnt", "min_white_cnt", "max_white_cnt",
    "avg_dtc_white", "min_dtc_white", "max_dtc_white",
    "min_cross_sim", "max_cross_sim", "avg_cross_sim",
};
using CbFilterRow = std::array<double, kCbFilterFeatureNames.size()>;

CbFilterRow cbfilter_features(const sim::ReferenceSet& refset);

/// Empty dataset with the CBFilter column names. Label 1 marks a reference
/// set that should be rejected.
learn::Dataset cbfilter_dataset();

/// Random forest over CBFilter rows. Throws DegenerateTrainingSet unless both
/// labels occur.
class CbFilter {
 public:
  CbFilter() = default;
  explicit CbFilter(learn::Model model);

  static CbFilter train(const learn::Dataset& rsb, std::uint64_t seed, const learn::ForestParams& params = {});

  /// Probability that the set belongs to the reject class.
  double reject_score(const sim::ReferenceSet& refset) const;
  bool rejects(const sim::ReferenceSet& refset) const { return reject_score(refset) >= 0.5; }
  FilterVerdict verdict(const sim::ReferenceSet& refset) const;
  const learn::Model& model() const noexcept { return model_; }

 private:
  learn::Model model_;
};

}  // namespace trinket::filt
