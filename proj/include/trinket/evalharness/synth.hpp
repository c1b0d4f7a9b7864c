#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trinket/evalharness/corpus.hpp"
#include "trinket/imgcore/gray_image.hpp"

namespace trinket::eval {

/// Texture styles; trinket i gets category i % 6.
inline constexpr std::array<std::string_view, 6> kSynthCategories = {"blocks", "stripes", "dots",
                                                                     "glyphs", "checker", "mosaic"};

struct SynthConfig {
  int n_trinkets = 60;
  std::uint64_t seed = 1;
  int width = 270;
  int height = 312;
  double diameter = 180;          // trinket disc, pixels at scale 1
  double max_rotation_deg = 20;
  double max_scale = 0.15;        // relative
  double max_brightness = 0.25;   // relative gain
  double max_shift = 12;          // pixels
  double noise_sigma = 2;
};

struct SynthImage {
  std::string id;
  img::GrayImage image;
};

struct SynthCorpus {
  TrinketCorpus corpus;
  std::vector<SynthImage> images;      // every view of every corpus trinket
  std::vector<TrinketEntry> negatives; // plain-textured and blurry trinkets, category "plain" / "blurry"
  std::vector<SynthImage> negative_images;

  void add_to(ImageBank& bank) const;
  /// PNG files plus manifest.csv (corpus) and negatives.csv.
  void write(const std::filesystem::path& dir) const;
};

/// Seeded textured disc "trinkets", 4 views each with random rotation,
/// scale, brightness, position and background. Throws ShapeError unless
/// n_trinkets >= 10 and divisible by 10.
SynthCorpus synth_corpus(const SynthConfig& cfg);

/// Attack dictionary: textured objects of every category (unrelated to any
/// corpus trinket) and cluttered scenes. ids "d0000"...
std::vector<SynthImage> synth_distractors(int n, std::uint64_t seed, std::vector<std::string>* categories = nullptr,
                                          const SynthConfig& cfg = {});

/// A master-image fixture: a two-column grid of native-scale center crops
/// taken from `view` of each listed trinket, built to match all of their
/// reference sets at once.
SynthImage clutter_fixture(const SynthCorpus& synth, std::span<const std::size_t> trinkets, int view,
                           std::uint64_t seed);

}  // namespace trinket::eval
