#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trinket/evalharness/crossval.hpp"

namespace trinket::eval {

enum class AttackKind { Pictionary, ShoulderSurf, MasterProbe };
/// "pictionary", "shoulder", "master"
std::string_view to_string(AttackKind k);
AttackKind parse_attack_kind(std::string_view s);

/// A victim's enrolled reference set.
struct AttackTarget {
  std::string id;
  std::array<std::string, 3> refs;
  std::string category;
};

/// One dictionary image; the category is needed for shoulder surfing only.
struct AttackImage {
  std::string id;
  std::string category;
};

/// Every corpus trinket as a victim enrolled with its views 2-4.
std::vector<AttackTarget> corpus_targets(const TrinketCorpus& corpus);

/// CSV rows `path,category` with a header. Relative paths resolve against
/// the file's directory and the resolved absolute path becomes the image id.
std::vector<AttackImage> read_dictionary(const std::filesystem::path& path);
/// Writes ids verbatim as paths.
void write_dictionary(std::span<const AttackImage> images, const std::filesystem::path& path);

std::size_t attack_instance_count(std::size_t targets, std::size_t images);

/// Order in which the attacker tries the dictionary against `target`:
/// dictionary order, or for shoulder surfing the images of the target's
/// category first (each group in dictionary order). Throws MissingCategories
/// for shoulder surfing when the target or any image lacks a category.
std::vector<std::size_t> trial_order(const AttackTarget& target, std::span<const AttackImage> images, AttackKind kind);

/// Streams every attack instance, target by target, each in trial order.
/// Instance ids are "<target>><image>".
void for_each_attack_instance(std::span<const AttackTarget> targets, std::span<const AttackImage> images,
                              AttackKind kind, const std::function<void(const AuthInstance&)>& fn);

struct AttackDecision {
  std::string target;
  std::string image;
  double score = 0;  // -1 when a candidate rule rejected the image
  bool accepted = false;

  friend bool operator==(const AttackDecision&, const AttackDecision&) = default;
};

struct AttackConfig {
  double threshold = 0.5;
  std::size_t feature_count = sim::kFeatureCount;
  bool candidate_filters = true;  // RBFilter candidate rule and UBounds
  filt::FilterRuleConfig filters;
};

struct AttackRun {
  AttackKind kind = AttackKind::Pictionary;
  std::size_t corpus_size = 0;
  /// Per target, 1-based position of the first false accept in trial order;
  /// corpus_size when the target was never broken.
  std::vector<std::size_t> trials_until_success;
  std::vector<std::size_t> accepts_per_target;
  double far = 0;  // percent of all attack instances
  std::vector<AttackDecision> decisions;
};

AttackRun run_attack(std::span<const AttackTarget> targets, std::span<const AttackImage> images, AttackKind kind,
                     MatchCache& cache, const Scorer& scorer, const AttackConfig& cfg = {});

/// Header `target,image,score,decision`.
std::string attack_log_csv(std::span<const AttackDecision> log);
std::vector<AttackDecision> parse_attack_log(std::string_view text);
void write_attack_log(std::span<const AttackDecision> log, const std::filesystem::path& path);
std::vector<AttackDecision> read_attack_log(const std::filesystem::path& path);

struct MasterImage {
  std::string image;
  std::size_t refsets = 0;

  friend bool operator==(const MasterImage&, const MasterImage&) = default;
};

/// Images falsely accepted by at least `min_matches` distinct targets, most
/// prolific first (ties by image id).
std::vector<MasterImage> find_master_images(std::span<const AttackDecision> decisions, std::size_t min_matches = 5);

}  // namespace trinket::eval
