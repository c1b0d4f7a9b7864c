#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "trinket/evalharness/corpus.hpp"

namespace trinket::eval {

struct AuthInstance {
  std::string id;  // "s<subset>f<fold>:<candidate trinket>><reference trinket>"
  std::string candidate;
  std::array<std::string, 3> refs;
  int label = 0;  // learn::kGenuine or learn::kFraud
  int subset = 0;
  int fold = 0;
  std::size_t candidate_trinket = 0;  // indices into the corpus
  std::size_t reference_trinket = 0;
};

struct Fold {
  int index = 0;
  std::vector<std::size_t> trinkets;
  std::vector<AuthInstance> instances;  // genuine first, then fraud
};

/// One random partition of the corpus into folds, with a fresh candidate
/// view drawn per trinket.
struct Subset {
  int index = 0;
  std::vector<Fold> folds;
  std::size_t instance_count() const;
};

/// Every trinket contributes one genuine instance and one fraud instance per
/// other trinket of its fold. Pure function of (corpus, seed). Throws
/// ShapeError when the trinket count is not divisible by n_folds.
std::vector<Subset> generate_subsets(const TrinketCorpus& corpus, std::uint64_t seed, int n_subsets = 10,
                                     int n_folds = 10);

/// Instance counts without materializing them: {per fold, per subset, total}.
struct ProtocolCounts {
  std::size_t genuine_per_fold = 0, fraud_per_fold = 0, per_subset = 0, total = 0;
};
ProtocolCounts protocol_counts(std::size_t n_trinkets, int n_subsets = 10, int n_folds = 10);

/// Reference image ids of the test fold that also occur (as candidate or
/// reference) in a training instance of the same subset. Empty when clean.
std::vector<std::string> taint_audit(const Subset& subset, int test_fold);

}  // namespace trinket::eval
