#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trinket/evalharness/crossval.hpp"

namespace trinket::eval {

enum class Outcome { TA, TR, FA, FR };
Outcome outcome_of(int label, bool accepted);

struct HistPoint {
  double x = 0;
  double y = 0;
  Outcome outcome = Outcome::TA;
};

/// Equal-width bins over [lo, hi]; values outside land in the edge bins.
struct HistAxis {
  double lo = 0;
  double hi = 1;
  int bins = 10;
};
/// Spans the observed values.
HistAxis fit_axis(std::span<const double> values, int bins);

struct HistCell {
  int ix = 0, iy = 0;
  double x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
  long long ta = 0, tr = 0, fa = 0, fr = 0;
  /// 1 when errors outnumber correct outcomes, -1 for an empty cell, else 0.
  int flag = 0;
};

/// Cells in row-major order (iy outer).
std::vector<HistCell> rule_discovery_histograms(std::span<const HistPoint> points, const HistAxis& x,
                                                const HistAxis& y);
std::string histogram_csv(std::span<const HistCell> cells, std::string_view x_name, std::string_view y_name);

/// Per-instance quantities that can be histogrammed: the classifier
/// features, the template and cross-similarity statistics of the reference
/// set (t_*, min/max/avg_cross_sim) and the candidate's filter statistics
/// (c_kp_cnt, c_dtc_kp, c_white_cnt, c_dtc_white).
std::vector<std::string> analysis_columns();
/// Throws FormatError for an unknown column.
double analysis_value(std::string_view column, const AuthInstance& inst, MatchCache& cache);

/// Points for every non-removed logged decision of the given instances.
std::vector<HistPoint> histogram_points(const std::vector<Subset>& subsets, std::span<const DecisionRecord> log,
                                        MatchCache& cache, std::string_view x_column, std::string_view y_column);

}  // namespace trinket::eval
