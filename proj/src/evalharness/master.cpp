#include "trinket/evalharness/master.hpp"

#include <algorithm>
#include <numeric>

#include "trinket/common/error.hpp"

namespace trinket::eval {

std::vector<AttackTarget> synth_targets(const SynthCorpus& synth) { return corpus_targets(synth.corpus); }

namespace {

struct Trial {
  SynthImage image;
  std::vector<double> scores;
  std::size_t accepted = 0;
  double total = 0;

  bool better_than(const Trial& o) const { return accepted != o.accepted ? accepted > o.accepted : total > o.total; }
};

}  // namespace

MasterFixture engineer_master_fixture(const SynthCorpus& synth, MatchCache& cache, const Scorer& scorer,
                                      const AttackConfig& cfg, std::size_t tiles, int max_iters) {
  const auto targets = synth_targets(synth);
  if (tiles == 0 || tiles > targets.size()) throw Error(ErrorCode::ShapeError, "bad tile count");
  int serial = 0;
  auto evaluate = [&](const std::vector<std::size_t>& chosen) {
    Trial t;
    t.image = clutter_fixture(synth, chosen, 1, static_cast<std::uint64_t>(serial));
    t.image.id = "clutter_" + std::to_string(serial++) + ".png";
    cache.bank().add(t.image.id, t.image.image);
    std::vector<AttackTarget> victims;
    for (auto c : chosen) victims.push_back(targets[c]);
    const std::vector<AttackImage> probe = {{t.image.id, ""}};
    for (const auto& d : run_attack(victims, probe, AttackKind::MasterProbe, cache, scorer, cfg).decisions) {
      t.scores.push_back(d.score);
      t.accepted += d.accepted;
      t.total += std::min(d.score, cfg.threshold);
    }
    return t;
  };

  std::vector<std::size_t> chosen(tiles);
  std::iota(chosen.begin(), chosen.end(), 0);
  auto best = evaluate(chosen);
  std::size_t next = tiles;
  for (int it = 0; it < max_iters && best.accepted < tiles; ++it) {
    // Swap the weakest tile for the next unused trinket; keep the swap only
    // when the fixture improves.
    while (std::find(chosen.begin(), chosen.end(), next % targets.size()) != chosen.end()) ++next;
    const auto worst = static_cast<std::size_t>(
        std::min_element(best.scores.begin(), best.scores.end()) - best.scores.begin());
    auto trial_set = chosen;
    trial_set[worst] = next++ % targets.size();
    auto trial = evaluate(trial_set);
    if (trial.better_than(best)) {
      best = std::move(trial);
      chosen = std::move(trial_set);
    }
  }
  best.image.id = "clutter.png";
  return {std::move(best.image), chosen, best.accepted};
}

}  // namespace trinket::eval
