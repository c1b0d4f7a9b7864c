#pragma once

#include <span>
#include <vector>

namespace trinket::learn {

struct Scored {
  double score = 0;
  int label = 0;  // 1 genuine, 0 fraud
};

/// Rates in percent.
struct EvalReport {
  double far = 0;
  double frr = 0;
  double f_measure = 0;
  double eer = 0;
  double threshold_at_eer = 0;
  long long ta = 0, tr = 0, fa = 0, fr = 0;
};

/// Accept iff score >= threshold. Throws UndefinedMetric unless both classes
/// are present. eer/threshold_at_eer are filled in as well.
EvalReport evaluate(std::span<const Scored> scores, double threshold = 0.5);

struct EerResult {
  double eer = 0;        // percent
  double threshold = 0;
};

/// Sweeps every distinct score as a threshold (plus one above the maximum)
/// and interpolates linearly where FRR - FAR changes sign.
EerResult compute_eer(std::span<const Scored> scores);

/// Probability that a random genuine instance outscores a random fraud one,
/// ties counting half.
double roc_auc(std::span<const Scored> scores);

}  // namespace trinket::learn
