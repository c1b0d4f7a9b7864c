#include "trinket/filters/filters.hpp"

#include <algorithm>

#include "trinket/common/error.hpp"

namespace trinket::filt {

std::string_view code_name(FeedbackCode code) {
  switch (code) {
    case FeedbackCode::LowQualityOrPlain: return "LOW_QUALITY_OR_PLAIN";
    case FeedbackCode::NonIdenticalTrinkets: return "NON_IDENTICAL_TRINKETS";
    case FeedbackCode::OutOfBounds: return "OUT_OF_BOUNDS";
  }
  return "?";
}

std::string_view feedback_message(FeedbackCode code) {
  switch (code) {
    case FeedbackCode::LowQualityOrPlain:
      return "The image quality is low or the trinket is too plain. Use better light, hold the camera steady, "
             "and choose an object with visible texture.";
    case FeedbackCode::NonIdenticalTrinkets:
      return "The reference images are inconsistent. Take all three photos of the same trinket.";
    case FeedbackCode::OutOfBounds:
      return "This photo looks unlike the images the system knows. Center the trinket inside the circle and try "
             "again.";
  }
  return "";
}

std::string_view rule_name(RuleId rule) {
  switch (rule) {
    case RuleId::RefKpCnt: return "ref_kp_cnt";
    case RuleId::RefDtcKp: return "ref_dtc_kp";
    case RuleId::RefAvgCrossSim: return "ref_avg_cross_sim";
    case RuleId::CandKpCnt: return "cand_kp_cnt";
    case RuleId::CandDtcKp: return "cand_dtc_kp";
    case RuleId::CandWhiteCnt: return "cand_white_cnt";
    case RuleId::CandDtcWhite: return "cand_dtc_white";
    case RuleId::CbFilter: return "cbfilter";
  }
  return "?";
}

void FilterVerdict::reject(RuleId rule, FeedbackCode code) {
  reasons.push_back({rule, code, std::string(feedback_message(code))});
}

void FilterVerdict::merge(const FilterVerdict& other) {
  reasons.insert(reasons.end(), other.reasons.begin(), other.reasons.end());
}

std::vector<FeedbackCode> FilterVerdict::codes() const {
  std::vector<FeedbackCode> out;
  for (const auto& r : reasons)
    if (std::find(out.begin(), out.end(), r.code) == out.end()) out.push_back(r.code);
  return out;
}

FilterRuleConfig FilterRuleConfig::from_kv(const KvConfig& kv) {
  FilterRuleConfig c;
  c.ref_kp_cnt_min = kv.get_double("ref_kp_cnt_min", c.ref_kp_cnt_min);
  c.ref_dtc_kp_min = kv.get_double("ref_dtc_kp_min", c.ref_dtc_kp_min);
  c.ref_avg_cross_sim_min = kv.get_double("ref_avg_cross_sim_min", c.ref_avg_cross_sim_min);
  c.cand_kp_cnt_min = kv.get_double("cand_kp_cnt_min", c.cand_kp_cnt_min);
  c.cand_dtc_kp_max = kv.get_double("cand_dtc_kp_max", c.cand_dtc_kp_max);
  c.cand_white_cnt_max = kv.get_double("cand_white_cnt_max", c.cand_white_cnt_max);
  c.cand_dtc_white_max = kv.get_double("cand_dtc_white_max", c.cand_dtc_white_max);
  c.validate();
  return c;
}

FilterRuleConfig FilterRuleConfig::load(const std::filesystem::path& path) { return from_kv(KvConfig::load(path)); }

void FilterRuleConfig::validate() const {
  for (double v : {ref_kp_cnt_min, ref_dtc_kp_min, ref_avg_cross_sim_min, cand_kp_cnt_min, cand_dtc_kp_max,
                   cand_white_cnt_max, cand_dtc_white_max})
    if (!(v > 0)) throw Error(ErrorCode::FormatError, "filter thresholds must be positive");
}

sim::ImageStats compute_filter_stats(const img::GrayImage& image, const sim::PipelineConfig& cfg) {
  return sim::process_image("", image, cfg).stats;
}

FilterVerdict rbfilter_reference(const sim::ReferenceSet& refset, const FilterRuleConfig& cfg) {
  FilterVerdict v;
  const auto& t = refset.template_image().stats;
  if (t.kp_cnt < cfg.ref_kp_cnt_min) v.reject(RuleId::RefKpCnt, FeedbackCode::LowQualityOrPlain);
  if (t.dtc_kp < cfg.ref_dtc_kp_min) v.reject(RuleId::RefDtcKp, FeedbackCode::LowQualityOrPlain);
  if (refset.stats().avg_cross_sim < cfg.ref_avg_cross_sim_min)
    v.reject(RuleId::RefAvgCrossSim, FeedbackCode::NonIdenticalTrinkets);
  return v;
}

FilterVerdict rbfilter_candidate(const sim::ImageStats& stats, const FilterRuleConfig& cfg) {
  FilterVerdict v;
  if (stats.kp_cnt < cfg.cand_kp_cnt_min) v.reject(RuleId::CandKpCnt, FeedbackCode::LowQualityOrPlain);
  return v;
}

FilterVerdict ubounds_candidate(const sim::ImageStats& stats, const FilterRuleConfig& cfg) {
  FilterVerdict v;
  if (stats.dtc_kp > cfg.cand_dtc_kp_max) v.reject(RuleId::CandDtcKp, FeedbackCode::OutOfBounds);
  if (stats.white_cnt > cfg.cand_white_cnt_max) v.reject(RuleId::CandWhiteCnt, FeedbackCode::OutOfBounds);
  if (stats.dtc_white > cfg.cand_dtc_white_max) v.reject(RuleId::CandDtcWhite, FeedbackCode::OutOfBounds);
  return v;
}

CbFilterRow cbfilter_features(const sim::ReferenceSet& refset) {
  CbFilterRow row{};
  const auto& t = refset.template_image().stats;
  row[0] = t.kp_cnt;
  row[1] = t.dtc_kp;
  row[2] = t.white_cnt;
  row[3] = t.dtc_white;
  std::size_t k = 4;
  for (auto field : {&sim::ImageStats::kp_cnt, &sim::ImageStats::dtc_kp, &sim::ImageStats::white_cnt,
                     &sim::ImageStats::dtc_white}) {
    double sum = 0, mn = 0, mx = 0;
    for (std::size_t i = 0; i < refset.size(); ++i) {
      const double v = refset.member(i).stats.*field;
      sum += v;
      mn = i ? std::min(mn, v) : v;
      mx = i ? std::max(mx, v) : v;
    }
    row[k++] = sum / static_cast<double>(refset.size());
    row[k++] = mn;
    row[k++] = mx;
  }
  const auto& st = refset.stats();
  row[k++] = st.min_cross_sim;
  row[k++] = st.max_cross_sim;
  row[k++] = st.avg_cross_sim;
  return row;
}

learn::Dataset cbfilter_dataset() {
  return learn::Dataset(std::vector<std::string>(kCbFilterFeatureNames.begin(), kCbFilterFeatureNames.end()));
}

CbFilter::CbFilter(learn::Model model) : model_(std::move(model)) {
  if (model_.width() != kCbFilterFeatureNames.size())
    throw Error(ErrorCode::FeatureWidthMismatch, "CBFilter model has the wrong feature width");
}

CbFilter CbFilter::train(const learn::Dataset& rsb, std::uint64_t seed, const learn::ForestParams& params) {
  if (rsb.width() != kCbFilterFeatureNames.size())
    throw Error(ErrorCode::FeatureWidthMismatch, "CBFilter rows have the wrong width");
  learn::TrainParams tp;
  tp.forest = params;
  return CbFilter(learn::train(learn::ModelKind::RandomForest, rsb, tp, seed));
}

double CbFilter::reject_score(const sim::ReferenceSet& refset) const {
  return model_.predict_proba(cbfilter_features(refset));
}

FilterVerdict CbFilter::verdict(const sim::ReferenceSet& refset) const {
  FilterVerdict v;
  if (rejects(refset)) v.reject(RuleId::CbFilter, FeedbackCode::LowQualityOrPlain);
  return v;
}

}  // namespace trinket::filt
