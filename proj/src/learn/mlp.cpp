#include "trinket/learn/mlp.hpp"

#include <algorithm>
#include <cmath>

namespace trinket::learn {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z), overflow-safe
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

MlpNet MlpNet::init(int inputs, int hidden, Rng& rng) {
  MlpNet n;
  n.inputs = inputs;
  n.hidden = hidden;
  const double a1 = std::sqrt(6.0 / (inputs + hidden));
  const double a2 = std::sqrt(6.0 / (hidden + 1));
  n.w1.resize(static_cast<std::size_t>(inputs) * hidden);
  for (auto& w : n.w1) w = uniform_real(rng, -a1, a1);
  n.b1.assign(hidden, 0.0);
  n.w2.resize(hidden);
  for (auto& w : n.w2) w = uniform_real(rng, -a2, a2);
  return n;
}

std::vector<double> MlpNet::parameters() const {
  std::vector<double> p;
  p.reserve(parameter_count());
  p.insert(p.end(), w1.begin(), w1.end());
  p.insert(p.end(), b1.begin(), b1.end());
  p.insert(p.end(), w2.begin(), w2.end());
  p.push_back(b2);
  return p;
}

void MlpNet::set_parameters(std::span<const double> p) {
  auto it = p.begin();
  std::copy_n(it, w1.size(), w1.begin());
  it += static_cast<std::ptrdiff_t>(w1.size());
  std::copy_n(it, b1.size(), b1.begin());
  it += static_cast<std::ptrdiff_t>(b1.size());
  std::copy_n(it, w2.size(), w2.begin());
  it += static_cast<std::ptrdiff_t>(w2.size());
  b2 = *it;
}

namespace {

// Returns the output pre-activation; fills h with hidden activations.
double pre_output(const MlpNet& n, std::span<const double> x, std::vector<double>& h) {
  h.resize(n.hidden);
  double z = n.b2;
  for (int j = 0; j < n.hidden; ++j) {
    double a = n.b1[j];
    const double* w = n.w1.data() + static_cast<std::size_t>(j) * n.inputs;
    for (int i = 0; i < n.inputs; ++i) a += w[i] * x[i];
    h[j] = sigmoid(a);
    z += n.w2[j] * h[j];
  }
  return z;
}

}  // namespace

double MlpNet::forward(std::span<const double> x) const {
  std::vector<double> h;
  return sigmoid(pre_output(*this, x, h));
}

double mlp_loss(const MlpNet& net, std::span<const double> x, std::span<const int> y) {
  std::vector<double> h;
  double sum = 0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    const double z = pre_output(net, x.subspan(r * net.inputs, net.inputs), h);
    // -[y log s(z) + (1-y) log(1 - s(z))]
    sum += y[r] ? softplus(-z) : softplus(z);
  }
  return y.empty() ? 0.0 : sum / static_cast<double>(y.size());
}

std::vector<double> mlp_gradient(const MlpNet& net, std::span<const double> x, std::span<const int> y) {
  const std::size_t nw1 = net.w1.size(), nb1 = net.b1.size(), nw2 = net.w2.size();
  std::vector<double> g(net.parameter_count(), 0.0);
  double* gw1 = g.data();
  double* gb1 = gw1 + nw1;
  double* gw2 = gb1 + nb1;
  double& gb2 = g[nw1 + nb1 + nw2];
  std::vector<double> h;
  for (std::size_t r = 0; r < y.size(); ++r) {
    auto xr = x.subspan(r * net.inputs, net.inputs);
    const double delta = sigmoid(pre_output(net, xr, h)) - y[r];
    gb2 += delta;
    for (int j = 0; j < net.hidden; ++j) {
      gw2[j] += delta * h[j];
      const double dh = delta * net.w2[j] * h[j] * (1.0 - h[j]);
      gb1[j] += dh;
      double* gw = gw1 + static_cast<std::size_t>(j) * net.inputs;
      for (int i = 0; i < net.inputs; ++i) gw[i] += dh * xr[i];
    }
  }
  if (!y.empty())
    for (auto& v : g) v /= static_cast<double>(y.size());
  return g;
}

}  // namespace trinket::learn
