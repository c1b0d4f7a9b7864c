#pragma once

#include <cstddef>
#include <vector>

#include "trinket/evalharness/attacks.hpp"
#include "trinket/evalharness/synth.hpp"

namespace trinket::eval {

/// Victims for every corpus trinket: views 1-3 as the reference set.
std::vector<AttackTarget> synth_targets(const SynthCorpus& synth);

struct MasterFixture {
  SynthImage image;
  std::vector<std::size_t> trinkets;  // tile sources, also the intended victims
  std::size_t accepted = 0;           // intended victims the scorer accepts
};

/// Hill-climbs the choice of tile trinkets of a clutter fixture (tiles cut
/// from reference view 1) until the scorer accepts it against every intended
/// victim or `max_iters` swaps were tried. Returns the best fixture seen.
MasterFixture engineer_master_fixture(const SynthCorpus& synth, MatchCache& cache, const Scorer& scorer,
                                      const AttackConfig& cfg, std::size_t tiles = 6, int max_iters = 60);

}  // namespace trinket::eval
