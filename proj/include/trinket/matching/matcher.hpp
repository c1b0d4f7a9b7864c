#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "trinket/keypoints/keypoint.hpp"

namespace trinket::match {

struct Match {
  int query_idx = 0;  // index into the candidate's keypoints
  int train_idx = 0;  // index into the reference's keypoints
  int distance = 0;   // Hamming bits, 0..256

  friend bool operator==(const Match&, const Match&) = default;
};

/// Exhaustive Hamming nearest neighbour from `query` into `train`, kept only
/// when the pair is mutually nearest. Ties resolve to the lowest index.
/// Output is ordered by query index.
std::vector<Match> match_bruteforce(std::span<const kp::BinaryDescriptor> query,
                                    std::span<const kp::BinaryDescriptor> train);

/// Seed for an instance's RANSAC stream, derived from both descriptor sets.
std::uint64_t match_seed(std::span<const kp::BinaryDescriptor> query,
                         std::span<const kp::BinaryDescriptor> train);

}  // namespace trinket::match
