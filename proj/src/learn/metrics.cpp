#include "trinket/learn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "trinket/common/error.hpp"

namespace trinket::learn {
namespace {

void require_both_classes(std::span<const Scored> scores) {
  bool g = false, f = false;
  for (const auto& s : scores) (s.label ? g : f) = true;
  if (!g || !f) throw Error(ErrorCode::UndefinedMetric, "scores must include both genuine and fraud instances");
}

}  // namespace

EerResult compute_eer(std::span<const Scored> scores) {
  require_both_classes(scores);
  std::vector<Scored> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });
  double n_gen = 0, n_fra = 0;
  for (const auto& s : v) (s.label ? n_gen : n_fra) += 1;

  // Threshold t accepts scores >= t. Walking thresholds upward over the
  // distinct scores, FRR rises and FAR falls.
  struct Point {
    double t, far, frr;
  };
  std::vector<Point> pts;
  double rejected_gen = 0, rejected_fra = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    const double t = v[i].score;
    pts.push_back({t, 100.0 * (n_fra - rejected_fra) / n_fra, 100.0 * rejected_gen / n_gen});
    while (i < v.size() && v[i].score == t) {
      (v[i].label ? rejected_gen : rejected_fra) += 1;
      ++i;
    }
  }
  // Above every score: everything rejected.
  pts.push_back({std::nextafter(v.back().score, std::numeric_limits<double>::infinity()), 0.0, 100.0});

  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double d = pts[k].frr - pts[k].far;
    if (d == 0) return {pts[k].far, pts[k].t};
    if (d > 0) {
      // crossing between k-1 (d < 0) and k
      const auto& a = pts[k - 1];
      const auto& b = pts[k];
      const double da = a.frr - a.far;
      const double w = da / (da - d);
      return {a.far + w * (b.far - a.far), a.t + w * (b.t - a.t)};
    }
  }
  return {pts.back().far, pts.back().t};
}

EvalReport evaluate(std::span<const Scored> scores, double threshold) {
  require_both_classes(scores);
  EvalReport r;
  for (const auto& s : scores) {
    const bool accept = s.score >= threshold;
    if (s.label) (accept ? r.ta : r.fr) += 1;
    else (accept ? r.fa : r.tr) += 1;
  }
  r.far = 100.0 * static_cast<double>(r.fa) / static_cast<double>(r.fa + r.tr);
  r.frr = 100.0 * static_cast<double>(r.fr) / static_cast<double>(r.fr + r.ta);
  const double tp = static_cast<double>(r.ta);
  const double denom = 2 * tp + static_cast<double>(r.fa + r.fr);
  r.f_measure = denom > 0 ? 100.0 * 2 * tp / denom : 0.0;
  const auto e = compute_eer(scores);
  r.eer = e.eer;
  r.threshold_at_eer = e.threshold;
  return r;
}

double roc_auc(std::span<const Scored> scores) {
  require_both_classes(scores);
  std::vector<Scored> v(scores.begin(), scores.end());
  std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) { return a.score < b.score; });
  // Mann-Whitney U with mid-ranks.
  double rank_sum = 0, n_gen = 0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j].score == v[i].score) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (v[k].label) {
        rank_sum += mid;
        n_gen += 1;
      }
    i = j;
  }
  const double n_fra = static_cast<double>(v.size()) - n_gen;
  return (rank_sum - n_gen * (n_gen + 1) / 2.0) / (n_gen * n_fra);
}

}  // namespace trinket::learn
