#include "trinket/simfeat/reference_set.hpp"

#include <algorithm>
#include <limits>

#include "trinket/common/error.hpp"

namespace trinket::sim {

ReferenceStats reference_stats(const SimMatrix& sims) {
  const std::size_t n = sims.size();
  if (n < 3) throw Error(ErrorCode::ReferenceSetTooSmall, "reference set needs at least 3 images");
  for (const auto& row : sims)
    if (row.size() != n) throw Error(ErrorCode::ShapeError, "similarity matrix is not square");

  ReferenceStats s;
  double best = -1;
  for (std::size_t j = 0; j < n; ++j) {
    double col = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (i != j) col += sims[i][j];
    if (col > best) {
      best = col;
      s.template_idx = static_cast<int>(j);
    }
  }

  double nn_sum = 0, fn_sum = 0, cross_sum = 0;
  s.min_cross_sim = std::numeric_limits<double>::infinity();
  s.max_cross_sim = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      mx = std::max(mx, sims[i][j]);
      mn = std::min(mn, sims[i][j]);
      cross_sum += sims[i][j];
    }
    nn_sum += mx;
    fn_sum += mn;
    s.min_cross_sim = std::min(s.min_cross_sim, mn);
    s.max_cross_sim = std::max(s.max_cross_sim, mx);
  }
  const double dn = static_cast<double>(n);
  s.avg_ref_nn = nn_sum / dn;
  s.avg_ref_fn = fn_sum / dn;
  s.avg_cross_sim = cross_sum / (dn * (dn - 1));

  double templ = 0;
  for (std::size_t r = 0; r < n; ++r)
    if (static_cast<int>(r) != s.template_idx) templ += sims[r][s.template_idx];
  s.avg_ref_templ = templ / (dn - 1);
  return s;
}

std::pair<double, double> nn_fn(std::span<const double> member_sims) {
  if (member_sims.empty()) return {0.0, 0.0};
  auto [mn, mx] = std::minmax_element(member_sims.begin(), member_sims.end());
  return {*mx, *mn};
}

ReferenceSet::ReferenceSet(std::vector<ImagePtr> images, SimMatrix sims)
    : images_(std::move(images)), sims_(std::move(sims)) {
  if (images_.size() < 3) throw Error(ErrorCode::ReferenceSetTooSmall, "reference set needs at least 3 images");
  if (sims_.size() != images_.size())
    throw Error(ErrorCode::ShapeError, "similarity matrix does not match the reference images");
  stats_ = reference_stats(sims_);
}

SimMatrix similarity_matrix(std::span<const ReferenceSet::ImagePtr> images, const match::RansacConfig& cfg) {
  const std::size_t n = images.size();
  SimMatrix s(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) s[i][j] = similarity(*images[i], *images[j], cfg);
  return s;
}

ReferenceSet build_reference_set(std::vector<ReferenceSet::ImagePtr> images, const match::RansacConfig& cfg) {
  if (images.size() < 3) throw Error(ErrorCode::ReferenceSetTooSmall, "reference set needs at least 3 images");
  auto sims = similarity_matrix(images, cfg);
  return ReferenceSet(std::move(images), std::move(sims));
}

ReferenceSet build_reference_set(std::vector<ProcessedImage> images, const match::RansacConfig& cfg) {
  std::vector<ReferenceSet::ImagePtr> ptrs;
  ptrs.reserve(images.size());
  for (auto& im : images) ptrs.push_back(std::make_shared<const ProcessedImage>(std::move(im)));
  return build_reference_set(std::move(ptrs), cfg);
}

std::pair<double, double> nn_fn_sim(const ProcessedImage& c, const ReferenceSet& refset,
                                    const match::RansacConfig& cfg) {
  std::vector<double> sims;
  for (const auto& m : refset.images()) sims.push_back(similarity(c, *m, cfg));
  return nn_fn(sims);
}

}  // namespace trinket::sim
