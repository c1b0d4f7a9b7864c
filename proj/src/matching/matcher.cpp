#include "trinket/matching/matcher.hpp"

#include <limits>

#include "trinket/common/rng.hpp"

namespace trinket::match {

std::vector<Match> match_bruteforce(std::span<const kp::BinaryDescriptor> query,
                                    std::span<const kp::BinaryDescriptor> train) {
  std::vector<Match> out;
  if (query.empty() || train.empty()) return out;
  std::vector<int> best_train(query.size(), -1), best_train_d(query.size(), std::numeric_limits<int>::max());
  std::vector<int> best_query(train.size(), -1), best_query_d(train.size(), std::numeric_limits<int>::max());
  for (std::size_t q = 0; q < query.size(); ++q) {
    for (std::size_t t = 0; t < train.size(); ++t) {
      const int d = kp::hamming(query[q], train[t]);
      // Strict comparisons keep the lowest index on ties (loops ascend).
      if (d < best_train_d[q]) {
        best_train_d[q] = d;
        best_train[q] = static_cast<int>(t);
      }
      if (d < best_query_d[t]) {
        best_query_d[t] = d;
        best_query[t] = static_cast<int>(q);
      }
    }
  }
  for (std::size_t q = 0; q < query.size(); ++q) {
    const int t = best_train[q];
    if (best_query[t] == static_cast<int>(q)) out.push_back({static_cast<int>(q), t, best_train_d[q]});
  }
  return out;
}

std::uint64_t match_seed(std::span<const kp::BinaryDescriptor> query,
                         std::span<const kp::BinaryDescriptor> train) {
  auto bytes = [](std::span<const kp::BinaryDescriptor> d) {
    return std::span(reinterpret_cast<const std::uint8_t*>(d.data()), d.size_bytes());
  };
  std::uint64_t h = fnv1a(bytes(query));
  h = fnv1a(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>("|"), 1), h);
  return fnv1a(bytes(train), h);
}

}  // namespace trinket::match
