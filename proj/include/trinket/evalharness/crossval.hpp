#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trinket/evalharness/protocol.hpp"
#include "trinket/filters/filters.hpp"
#include "trinket/learn/metrics.hpp"
#include "trinket/learn/model.hpp"
#include "trinket/simfeat/features.hpp"

namespace trinket::eval {

enum class Ablation { None, Rb, Cb, Both };
inline constexpr std::array kAllAblations = {Ablation::None, Ablation::Rb, Ablation::Cb, Ablation::Both};
/// "none", "rb", "cb", "rb+cb"
std::string_view to_string(Ablation a);
Ablation parse_ablation(std::string_view s);

enum class Decision { Accept, Reject, Removed };
std::string_view to_string(Decision d);
Decision parse_decision(std::string_view s);

/// One row of the decision log. Instances rejected by a candidate rule carry
/// score -1; instances whose reference set was filtered out are Removed and
/// take no part in the rates.
struct DecisionRecord {
  std::string instance_id;
  int subset = 0;
  int fold = 0;
  int label = 0;
  double score = 0;
  Decision decision = Decision::Reject;
  std::vector<filt::FeedbackCode> codes;

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

/// Header `instance_id,subset,fold,label,score,decision,codes`; codes are
/// joined with ';'.
std::string decision_log_csv(std::span<const DecisionRecord> log);
std::vector<DecisionRecord> parse_decision_log(std::string_view text);
void write_decision_log(std::span<const DecisionRecord> log, const std::filesystem::path& path);
std::vector<DecisionRecord> read_decision_log(const std::filesystem::path& path);
/// Rates over every non-removed record, at the given acceptance threshold.
learn::EvalReport recompute_report(std::span<const DecisionRecord> log, double threshold = 0.5);

using Scorer = std::function<double(std::span<const double>)>;
using Trainer = std::function<Scorer(const learn::Dataset& train, std::uint64_t seed)>;
Trainer model_trainer(learn::ModelKind kind, learn::TrainParams params = {});

sim::FeatureVector instance_features(const AuthInstance& inst, MatchCache& cache);
/// First `width` feature columns of every instance, labelled.
learn::Dataset feature_dataset(std::span<const AuthInstance> instances, MatchCache& cache,
                               std::size_t width = sim::kFeatureCount);

struct CvConfig {
  std::vector<Ablation> ablations{kAllAblations.begin(), kAllAblations.end()};
  bool ubounds = false;
  std::size_t feature_count = sim::kFeatureCount;
  filt::FilterRuleConfig filters;
  learn::ForestParams cbfilter;
  double threshold = 0.5;
  std::uint64_t seed = 1;
};

struct AblationResult {
  Ablation ablation = Ablation::None;
  learn::EvalReport report;
  double auc = 0;
  bool rates_defined = true;  // false when filtering left only one class
  std::size_t removed = 0;
  std::vector<DecisionRecord> log;
};

struct CvResult {
  std::vector<AblationResult> runs;
  std::size_t rsb_sets = 0;     // distinct reference sets labelled from the baseline
  std::size_t rsb_rejects = 0;  // of which class 1
  std::size_t constant_cbfilters = 0;  // folds whose training sets held one class only

  const AblationResult& at(Ablation a) const;
};

/// Per subset, each fold is tested once by a model trained on the other
/// folds' instances. The model is shared by every ablation of a fold. The
/// CBFilter of a fold learns from the other folds' reference sets, labelled 1
/// when any of their instances was misclassified in the unfiltered run.
CvResult run_cross_validation(const std::vector<Subset>& subsets, MatchCache& cache, const Trainer& trainer,
                              const CvConfig& cfg = {});

/// Human-readable table and a CSV with one row per ablation.
std::string format_report(const CvResult& r);
std::string report_csv(const CvResult& r);

}  // namespace trinket::eval
