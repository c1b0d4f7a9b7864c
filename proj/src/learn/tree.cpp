#include "trinket/learn/tree.hpp"

#include <algorithm>
#include <numeric>

namespace trinket::learn {
namespace {

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0;
  double impurity = 0;  // weighted child Gini sum, lower is better
};

class Builder {
 public:
  Builder(const Dataset& ds, const TreeParams& p, Rng& rng) : ds_(ds), p_(p), rng_(rng) {}

  std::vector<TreeNode> run(std::vector<std::size_t> sample) {
    idx_ = std::move(sample);
    grow(0, idx_.size(), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::size_t lo, std::size_t hi, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::size_t n = hi - lo;
    std::size_t pos = 0;
    for (std::size_t i = lo; i < hi; ++i) pos += ds_.label(idx_[i]) == kGenuine;
    nodes_[id].value = n ? static_cast<double>(pos) / n : 0.0;

    const bool pure = pos == 0 || pos == n;
    if (pure || (p_.max_depth > 0 && depth >= p_.max_depth) || n < 2 * static_cast<std::size_t>(p_.min_leaf))
      return id;
    const Split s = best_split(lo, hi, pos);
    if (!s.found) return id;

    auto mid = std::partition(idx_.begin() + lo, idx_.begin() + hi,
                              [&](std::size_t r) { return ds_.row(r)[s.feature] <= s.threshold; });
    const std::size_t m = static_cast<std::size_t>(mid - idx_.begin());
    nodes_[id].feature = s.feature;
    nodes_[id].threshold = s.threshold;
    const int l = grow(lo, m, depth + 1);
    const int r = grow(m, hi, depth + 1);
    nodes_[id].left = l;
    nodes_[id].right = r;
    return id;
  }

  // Draws features in random order; after max_features of them, keeps
  // drawing only while no valid split has been found.
  Split best_split(std::size_t lo, std::size_t hi, std::size_t pos_total) {
    const int width = static_cast<int>(ds_.width());
    std::vector<int> features(width);
    std::iota(features.begin(), features.end(), 0);
    shuffle(std::span(features), rng_);
    const int k = p_.max_features > 0 ? std::min(p_.max_features, width) : width;

    Split best;
    const std::size_t n = hi - lo;
    std::vector<std::pair<double, int>> col(n);
    for (int fi = 0; fi < width; ++fi) {
      if (fi >= k && best.found) break;
      const int f = features[fi];
      for (std::size_t i = 0; i < n; ++i) col[i] = {ds_.row(idx_[lo + i])[f], ds_.label(idx_[lo + i])};
      std::sort(col.begin(), col.end());
      std::size_t left_pos = 0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_pos += col[i].second == kGenuine;
        if (col[i].first == col[i + 1].first) continue;
        const std::size_t nl = i + 1, nr = n - nl;
        if (nl < static_cast<std::size_t>(p_.min_leaf) || nr < static_cast<std::size_t>(p_.min_leaf)) continue;
        const double imp = gini_weighted(left_pos, nl) + gini_weighted(pos_total - left_pos, nr);
        if (!best.found || imp < best.impurity) {
          double t = col[i].first + (col[i + 1].first - col[i].first) / 2;
          if (!(t < col[i + 1].first)) t = col[i].first;
          best = {true, f, t, imp};
        }
      }
    }
    return best;
  }

  // n * Gini(node)
  static double gini_weighted(std::size_t pos, std::size_t n) {
    const double p = static_cast<double>(pos) / n;
    return n * 2.0 * p * (1.0 - p);
  }

  const Dataset& ds_;
  const TreeParams& p_;
  Rng& rng_;
  std::vector<std::size_t> idx_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

DecisionTree DecisionTree::fit(const Dataset& ds, std::span<const std::size_t> sample, const TreeParams& params,
                               Rng& rng) {
  return DecisionTree(Builder(ds, params, rng).run({sample.begin(), sample.end()}));
}

double DecisionTree::predict(std::span<const double> row) const {
  int i = 0;
  while (nodes_[i].feature >= 0) i = row[nodes_[i].feature] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
  return nodes_[i].value;
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature < 0) continue;
    d[nodes_[i].left] = d[nodes_[i].right] = d[i] + 1;
    best = std::max(best, d[i] + 1);
  }
  return best;
}

}  // namespace trinket::learn
