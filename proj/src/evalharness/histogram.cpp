#include "trinket/evalharness/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "trinket/common/error.hpp"
#include "trinket/common/text.hpp"

namespace trinket::eval {

Outcome outcome_of(int label, bool accepted) {
  if (label == learn::kGenuine) return accepted ? Outcome::TA : Outcome::FR;
  return accepted ? Outcome::FA : Outcome::TR;
}

HistAxis fit_axis(std::span<const double> values, int bins) {
  if (bins <= 0) throw Error(ErrorCode::ShapeError, "histogram needs at least one bin");
  if (values.empty()) return {0, 1, bins};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi > *lo ? *hi : *lo + 1, bins};
}

namespace {

int bin_of(double v, const HistAxis& a) {
  const int b = static_cast<int>(std::floor((v - a.lo) / (a.hi - a.lo) * a.bins));
  return std::clamp(b, 0, a.bins - 1);
}

}  // namespace

std::vector<HistCell> rule_discovery_histograms(std::span<const HistPoint> points, const HistAxis& x,
                                                const HistAxis& y) {
  if (x.bins <= 0 || y.bins <= 0 || !(x.hi > x.lo) || !(y.hi > y.lo))
    throw Error(ErrorCode::ShapeError, "bad histogram axis");
  std::vector<HistCell> cells(static_cast<std::size_t>(x.bins) * y.bins);
  const double wx = (x.hi - x.lo) / x.bins, wy = (y.hi - y.lo) / y.bins;
  for (int iy = 0; iy < y.bins; ++iy) {
    for (int ix = 0; ix < x.bins; ++ix) {
      auto& c = cells[iy * x.bins + ix];
      c.ix = ix;
      c.iy = iy;
      c.x_lo = x.lo + ix * wx;
      c.x_hi = x.lo + (ix + 1) * wx;
      c.y_lo = y.lo + iy * wy;
      c.y_hi = y.lo + (iy + 1) * wy;
    }
  }
  for (const auto& p : points) {
    auto& c = cells[bin_of(p.y, y) * x.bins + bin_of(p.x, x)];
    switch (p.outcome) {
      case Outcome::TA: ++c.ta; break;
      case Outcome::TR: ++c.tr; break;
      case Outcome::FA: ++c.fa; break;
      case Outcome::FR: ++c.fr; break;
    }
  }
  for (auto& c : cells) {
    if (c.ta + c.tr + c.fa + c.fr == 0) c.flag = -1;
    else c.flag = c.fa + c.fr > c.ta + c.tr ? 1 : 0;
  }
  return cells;
}

std::string histogram_csv(std::span<const HistCell> cells, std::string_view x_name, std::string_view y_name) {
  std::string out = "ix,iy," + std::string(x_name) + "_lo," + std::string(x_name) + "_hi," + std::string(y_name) +
                    "_lo," + std::string(y_name) + "_hi,ta,tr,fa,fr,flag\n";
  for (const auto& c : cells) {
    out += std::to_string(c.ix) + ',' + std::to_string(c.iy) + ',' + format_double(c.x_lo) + ',' +
           format_double(c.x_hi) + ',' + format_double(c.y_lo) + ',' + format_double(c.y_hi) + ',' +
           std::to_string(c.ta) + ',' + std::to_string(c.tr) + ',' + std::to_string(c.fa) + ',' +
           std::to_string(c.fr) + ',' + std::to_string(c.flag) + '\n';
  }
  return out;
}

namespace {

constexpr std::string_view kExtraColumns[] = {"t_kp_cnt",      "t_dtc_kp",      "t_white_cnt",   "t_dtc_white",
                                              "min_cross_sim", "max_cross_sim", "avg_cross_sim", "c_kp_cnt",
                                              "c_dtc_kp",      "c_white_cnt",   "c_dtc_white"};

double stat_of(const sim::ImageStats& s, std::string_view name) {
  if (name == "kp_cnt") return s.kp_cnt;
  if (name == "dtc_kp") return s.dtc_kp;
  if (name == "white_cnt") return s.white_cnt;
  return s.dtc_white;
}

}  // namespace

std::vector<std::string> analysis_columns() {
  std::vector<std::string> out(sim::kFeatureNames.begin(), sim::kFeatureNames.end());
  out.insert(out.end(), std::begin(kExtraColumns), std::end(kExtraColumns));
  return out;
}

double analysis_value(std::string_view column, const AuthInstance& inst, MatchCache& cache) {
  for (std::size_t i = 0; i < sim::kFeatureCount; ++i)
    if (sim::kFeatureNames[i] == column) return instance_features(inst, cache)[i];
  if (std::find(std::begin(kExtraColumns), std::end(kExtraColumns), column) == std::end(kExtraColumns))
    throw Error(ErrorCode::FormatError, "unknown analysis column '" + std::string(column) + "'");
  if (column.starts_with("c_")) return stat_of(cache.bank().get(inst.candidate)->stats, column.substr(2));
  const auto rs = cache.refset(inst.refs);
  if (column == "min_cross_sim") return rs->stats().min_cross_sim;
  if (column == "max_cross_sim") return rs->stats().max_cross_sim;
  if (column == "avg_cross_sim") return rs->stats().avg_cross_sim;
  return stat_of(rs->template_image().stats, column.substr(2));
}

std::vector<HistPoint> histogram_points(const std::vector<Subset>& subsets, std::span<const DecisionRecord> log,
                                        MatchCache& cache, std::string_view x_column, std::string_view y_column) {
  std::map<std::string, const AuthInstance*> by_id;
  for (const auto& s : subsets)
    for (const auto& f : s.folds)
      for (const auto& inst : f.instances) by_id[inst.id] = &inst;
  std::vector<HistPoint> out;
  for (const auto& r : log) {
    if (r.decision == Decision::Removed) continue;
    const auto it = by_id.find(r.instance_id);
    if (it == by_id.end()) throw Error(ErrorCode::FormatError, "log instance " + r.instance_id + " is not in the protocol");
    out.push_back({analysis_value(x_column, *it->second, cache), analysis_value(y_column, *it->second, cache),
                   outcome_of(r.label, r.decision == Decision::Accept)});
  }
  return out;
}

}  // namespace trinket::eval
