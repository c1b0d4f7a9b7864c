#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "trinket/simfeat/pair_match.hpp"

namespace trinket::sim {

/// sims[i][j] = Sim(image i as candidate, image j as reference); the diagonal
/// is ignored.
using SimMatrix = std::vector<std::vector<double>>;

struct ReferenceStats {
  int template_idx = 0;
  double avg_ref_nn = 0;
  double avg_ref_fn = 0;
  double avg_ref_templ = 0;
  double min_cross_sim = 0;
  double max_cross_sim = 0;
  double avg_cross_sim = 0;
};

/// Template = argmax_R sum_{r != R} Sim(r, R), lowest index on ties.
/// AvgRefNN / AvgRefFN average each member's max / min similarity to the
/// others; AvgRefTempl averages Sim(r, T) over r != T; the cross
/// similarities range over all ordered pairs i != j.
ReferenceStats reference_stats(const SimMatrix& sims);

/// (NNSim, FNSim): max and min over the given per-member similarities.
std::pair<double, double> nn_fn(std::span<const double> member_sims);

class ReferenceSet {
 public:
  using ImagePtr = std::shared_ptr<const ProcessedImage>;

  /// Throws ReferenceSetTooSmall for fewer than 3 images, ShapeError when the
  /// matrix does not match.
  ReferenceSet(std::vector<ImagePtr> images, SimMatrix sims);

  const std::vector<ImagePtr>& images() const noexcept { return images_; }
  std::size_t size() const noexcept { return images_.size(); }
  const ProcessedImage& member(std::size_t i) const { return *images_[i]; }
  const ProcessedImage& template_image() const { return *images_[stats_.template_idx]; }
  const ReferenceStats& stats() const noexcept { return stats_; }
  const SimMatrix& sims() const noexcept { return sims_; }

 private:
  std::vector<ImagePtr> images_;
  SimMatrix sims_;
  ReferenceStats stats_;
};

SimMatrix similarity_matrix(std::span<const ReferenceSet::ImagePtr> images, const match::RansacConfig& cfg = {});

/// Matches every pair of members and builds the set.
ReferenceSet build_reference_set(std::vector<ReferenceSet::ImagePtr> images, const match::RansacConfig& cfg = {});
ReferenceSet build_reference_set(std::vector<ProcessedImage> images, const match::RansacConfig& cfg = {});

std::pair<double, double> nn_fn_sim(const ProcessedImage& c, const ReferenceSet& refset,
                                    const match::RansacConfig& cfg = {});

}  // namespace trinket::sim
