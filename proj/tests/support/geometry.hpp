#pragma once

// Planted-homography correspondence fixtures.

#include <cmath>
#include <numbers>
#include <vector>

#include "trinket/common/rng.hpp"
#include "trinket/matching/homography.hpp"

namespace trinket::test {

inline match::Homography random_homography(Rng& rng) {
  const double a = uniform_real(rng, -30, 30) * std::numbers::pi / 180.0;
  const double s = uniform_real(rng, 0.8, 1.2);
  std::array<double, 9> m = {s * std::cos(a), -s * std::sin(a), uniform_real(rng, -30, 30),
                             s * std::sin(a), s * std::cos(a), uniform_real(rng, -30, 30),
                             uniform_real(rng, -2e-4, 2e-4), uniform_real(rng, -2e-4, 2e-4), 1.0};
  return match::Homography::from_matrix(m);
}

struct PlantedPoints {
  match::Homography truth;
  std::vector<match::Point2> a, b;
  std::vector<bool> is_inlier;
};

/// n_in exact correspondences under a random homography, then n_out pairs of
/// independent uniform points, shuffled together.
inline PlantedPoints planted_points(Rng& rng, int n_in, int n_out, double w = 270, double h = 312) {
  PlantedPoints p;
  p.truth = random_homography(rng);
  std::vector<std::size_t> order(n_in + n_out);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(std::span(order), rng);
  p.a.resize(order.size());
  p.b.resize(order.size());
  p.is_inlier.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto slot = order[k];
    match::Point2 pa{uniform_real(rng, 0, w), uniform_real(rng, 0, h)};
    match::Point2 pb;
    if (static_cast<int>(k) < n_in) {
      p.truth.apply(pa, pb);
      p.is_inlier[slot] = true;
    } else {
      pb = {uniform_real(rng, 0, w), uniform_real(rng, 0, h)};
    }
    p.a[slot] = pa;
    p.b[slot] = pb;
  }
  return p;
}

}  // namespace trinket::test
