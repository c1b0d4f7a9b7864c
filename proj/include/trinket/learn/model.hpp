#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "trinket/learn/dataset.hpp"
#include "trinket/learn/mlp.hpp"
#include "trinket/learn/tree.hpp"

namespace trinket::learn {

enum class ModelKind { RandomForest, Mlp, Tree };

std::string to_string(ModelKind kind);
/// Accepts "rf", "mlp", "tree". Throws FormatError otherwise.
ModelKind parse_model_kind(std::string_view s);

struct ForestParams {
  int n_trees = 100;
  TreeParams tree;  // max_features 0 means floor(sqrt(width))
};

struct MlpParams {
  int hidden = 16;
  double learning_rate = 0.01;
  int epochs = 200;
  int batch_size = 32;
};

struct TrainParams {
  ForestParams forest;
  TreeParams tree;
  MlpParams mlp;
};

class Model {
 public:
  Model() = default;

  ModelKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t width() const noexcept { return feature_names_.size(); }
  const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  const MlpNet& mlp() const noexcept { return mlp_; }
  /// Per-epoch training loss (MLP only).
  const std::vector<double>& loss_history() const noexcept { return loss_history_; }

  /// Genuine-class score in [0, 1]: the fraction of trees voting genuine for
  /// RF, the leaf's genuine fraction for a tree, the output unit for MLP.
  /// Throws FeatureWidthMismatch.
  double predict_proba(std::span<const double> row) const;

  std::string to_json() const;
  static Model from_json(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);

  friend bool operator==(const Model& a, const Model& b) { return a.to_json() == b.to_json(); }

 private:
  friend Model train(ModelKind, const Dataset&, const TrainParams&, std::uint64_t);

  ModelKind kind_ = ModelKind::RandomForest;
  std::uint64_t seed_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<DecisionTree> trees_;
  MlpNet mlp_;
  std::vector<double> mean_;
  std::vector<double> sd_;
  std::vector<double> loss_history_;
};

/// Throws DegenerateTrainingSet unless both labels occur.
Model train(ModelKind kind, const Dataset& ds, const TrainParams& params, std::uint64_t seed);

}  // namespace trinket::learn
