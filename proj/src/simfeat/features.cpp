#include "trinket/simfeat/features.hpp"

#include <cmath>

#include "trinket/common/error.hpp"
#include "trinket/common/text.hpp"

namespace trinket::sim {
namespace {

struct Summary {
  double min = 0, max = 0, mean = 0, sd = 0;
};

Summary summarize(const std::vector<double>& v) {
  Summary s;
  if (v.empty()) return s;
  s.min = s.max = v[0];
  double sum = 0;
  for (double x : v) {
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
    sum += x;
  }
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

double angle_diff(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

FeatureVector extract_features(const ProcessedImage& c, const ReferenceSet& refset,
                               std::span<const PairMatch> vs_members) {
  if (vs_members.size() != refset.size())
    throw Error(ErrorCode::ShapeError, "need one pair match per reference image");
  const auto& st = refset.stats();
  const auto& t = refset.template_image();
  const PairMatch& ct = vs_members[st.template_idx];

  std::vector<double> dist, size, resp, angle;
  for (const auto& m : ct.inliers) {
    const auto& a = c.keypoints[m.query_idx];
    const auto& b = t.keypoints[m.train_idx];
    dist.push_back(m.distance);
    size.push_back(std::abs(a.size - b.size));
    resp.push_back(std::abs(static_cast<double>(a.response) - b.response));
    angle.push_back(angle_diff(a.angle, b.angle));
  }

  std::vector<double> sims, dtcs;
  for (const auto& pm : vs_members) {
    sims.push_back(pm.similarity);
    dtcs.push_back(pm.dtc_mkp_query);
  }
  auto [nn, fn] = nn_fn(sims);
  const Summary dtc = summarize(dtcs);

  FeatureVector f{};
  std::size_t k = 0;
  f[k++] = static_cast<double>(c.keypoints.size());
  f[k++] = static_cast<double>(t.keypoints.size());
  f[k++] = ct.pre_ransac_matches;
  for (const auto* v : {&dist, &size, &resp, &angle}) {
    const Summary s = summarize(*v);
    f[k++] = s.min;
    f[k++] = s.max;
    f[k++] = s.mean;
    f[k++] = s.sd;
  }
  f[k++] = st.avg_ref_nn;
  f[k++] = st.avg_ref_fn;
  f[k++] = st.avg_ref_templ;
  f[k++] = ratio(ct.similarity, st.avg_ref_templ);
  f[k++] = ratio(fn, st.avg_ref_fn);
  f[k++] = ratio(nn, st.avg_ref_nn);
  f[k++] = static_cast<double>(ct.inliers.size());
  f[k++] = ratio(static_cast<double>(ct.inliers.size()), ct.pre_ransac_matches);
  f[k++] = ct.mean_reproj_error;
  f[k++] = ct.dtc_mkp_query;
  f[k++] = ct.dtc_mkp_train;
  f[k++] = dtc.min;
  f[k++] = dtc.max;
  f[k++] = dtc.mean;
  return f;
}

FeatureVector extract_features(const ProcessedImage& c, const ReferenceSet& refset, const match::RansacConfig& cfg) {
  std::vector<PairMatch> pms;
  for (const auto& m : refset.images()) pms.push_back(match_pair(c, *m, cfg));
  return extract_features(c, refset, pms);
}

std::string feature_csv_header() {
  std::string h;
  for (auto name : kFeatureNames) {
    h += name;
    h += ',';
  }
  return h + "label";
}

std::string format_feature_row(std::span<const double> features, int label) {
  std::string row;
  for (double v : features) {
    row += format_double(v);
    row += ',';
  }
  return row + std::to_string(label);
}

}  // namespace trinket::sim
