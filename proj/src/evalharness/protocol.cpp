#include "trinket/evalharness/protocol.hpp"

#include <numeric>
#include <set>

#include "trinket/common/error.hpp"
#include "trinket/common/rng.hpp"
#include "trinket/learn/dataset.hpp"

namespace trinket::eval {

std::size_t Subset::instance_count() const {
  std::size_t n = 0;
  for (const auto& f : folds) n += f.instances.size();
  return n;
}

ProtocolCounts protocol_counts(std::size_t n_trinkets, int n_subsets, int n_folds) {
  if (n_folds <= 0 || n_subsets <= 0 || n_trinkets == 0 || n_trinkets % n_folds != 0) {
    throw Error(ErrorCode::ShapeError, std::to_string(n_trinkets) + " trinkets do not split into " +
                                           std::to_string(n_folds) + " folds");
  }
  const std::size_t k = n_trinkets / n_folds;
  ProtocolCounts c;
  c.genuine_per_fold = k;
  c.fraud_per_fold = k * (k - 1);
  c.per_subset = (c.genuine_per_fold + c.fraud_per_fold) * n_folds;
  c.total = c.per_subset * n_subsets;
  return c;
}

namespace {

std::string instance_id(int subset, int fold, const TrinketCorpus& corpus, std::size_t c, std::size_t r) {
  return "s" + std::to_string(subset) + "f" + std::to_string(fold) + ":" + corpus.trinkets[c].id + ">" +
         corpus.trinkets[r].id;
}

}  // namespace

std::vector<Subset> generate_subsets(const TrinketCorpus& corpus, std::uint64_t seed, int n_subsets, int n_folds) {
  const auto counts = protocol_counts(corpus.trinkets.size(), n_subsets, n_folds);
  const std::size_t k = counts.genuine_per_fold;
  std::vector<Subset> out;
  for (int s = 0; s < n_subsets; ++s) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
    std::vector<std::size_t> order(corpus.trinkets.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(std::span(order), rng);
    std::vector<std::size_t> cand_view(corpus.trinkets.size());
    for (auto& v : cand_view) v = uniform_index(rng, 4);

    Subset sub;
    sub.index = s;
    for (int f = 0; f < n_folds; ++f) {
      Fold fold;
      fold.index = f;
      fold.trinkets.assign(order.begin() + f * k, order.begin() + (f + 1) * k);
      auto refs_of = [&](std::size_t t) {
        std::array<std::string, 3> r;
        int j = 0;
        for (std::size_t v = 0; v < 4; ++v)
          if (v != cand_view[t]) r[j++] = corpus.trinkets[t].images[v];
        return r;
      };
      auto make = [&](std::size_t c, std::size_t r) {
        AuthInstance inst;
        inst.id = instance_id(s, f, corpus, c, r);
        inst.candidate = corpus.trinkets[c].images[cand_view[c]];
        inst.refs = refs_of(r);
        inst.label = c == r ? learn::kGenuine : learn::kFraud;
        inst.subset = s;
        inst.fold = f;
        inst.candidate_trinket = c;
        inst.reference_trinket = r;
        return inst;
      };
      for (auto t : fold.trinkets) fold.instances.push_back(make(t, t));
      for (auto c : fold.trinkets)
        for (auto r : fold.trinkets)
          if (c != r) fold.instances.push_back(make(c, r));
      sub.folds.push_back(std::move(fold));
    }
    out.push_back(std::move(sub));
  }
  return out;
}

std::vector<std::string> taint_audit(const Subset& subset, int test_fold) {
  std::set<std::string> seen;
  for (const auto& f : subset.folds) {
    if (f.index == test_fold) continue;
    for (const auto& inst : f.instances) {
      seen.insert(inst.candidate);
      seen.insert(inst.refs.begin(), inst.refs.end());
    }
  }
  std::set<std::string> bad;
  for (const auto& f : subset.folds) {
    if (f.index != test_fold) continue;
    for (const auto& inst : f.instances)
      for (const auto& r : inst.refs)
        if (seen.count(r)) bad.insert(r);
  }
  return {bad.begin(), bad.end()};
}

}  // namespace trinket::eval
