#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trinket/common/rng.hpp"
#include "trinket/learn/dataset.hpp"

namespace trinket::learn {

struct TreeParams {
  int max_depth = 0;      // 0 = unlimited
  int min_leaf = 1;
  int max_features = 0;   // features drawn per split; 0 = all
};

struct TreeNode {
  int feature = -1;       // -1 marks a leaf
  double threshold = 0;   // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  double value = 0;       // fraction of genuine rows reaching the node
};

/// CART with Gini impurity.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  /// Trains on ds rows listed in `sample` (repeats allowed, as in bootstrap
  /// samples). Split thresholds are midpoints between adjacent distinct values.
  static DecisionTree fit(const Dataset& ds, std::span<const std::size_t> sample, const TreeParams& params, Rng& rng);

  double predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  int depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace trinket::learn
