#pragma once

#include <span>
#include <vector>

#include "trinket/common/rng.hpp"

namespace trinket::learn {

/// Input -> sigmoid hidden layer -> single sigmoid output.
struct MlpNet {
  int inputs = 0;
  int hidden = 0;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // hidden
  double b2 = 0;

  /// Xavier-uniform weights, zero biases.
  static MlpNet init(int inputs, int hidden, Rng& rng);

  std::size_t parameter_count() const noexcept { return w1.size() + b1.size() + w2.size() + 1; }
  /// Flat view order: w1, b1, w2, b2.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> p);

  double forward(std::span<const double> x) const;
};

/// Mean binary cross-entropy over the rows of x (row-major, net.inputs wide).
double mlp_loss(const MlpNet& net, std::span<const double> x, std::span<const int> y);

/// Gradient of mlp_loss in parameters() order.
std::vector<double> mlp_gradient(const MlpNet& net, std::span<const double> x, std::span<const int> y);

}  // namespace trinket::learn
