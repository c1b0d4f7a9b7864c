#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trinket/simfeat/reference_set.hpp"

namespace trinket::eval {

struct TrinketEntry {
  std::string id;
  std::string category;
  std::array<std::string, 4> images;  // image ids
};

/// Image ids are paths relative to `root` when the corpus comes from a
/// manifest file, or opaque keys for in-memory corpora.
struct TrinketCorpus {
  std::vector<TrinketEntry> trinkets;
  std::filesystem::path root;
};

/// CSV rows `trinket_id,category,path1,path2,path3,path4` with a header.
/// Relative paths resolve against the manifest's directory. Throws
/// FormatError on malformed rows, ShapeError on duplicate trinket ids.
TrinketCorpus read_manifest(const std::filesystem::path& path);
void write_manifest(const TrinketCorpus& corpus, const std::filesystem::path& path);

/// Processed images by id. Images are loaded from disk on first use (and
/// center-cropped to the canonical frame when larger) unless they were added
/// in memory. Thread-safe.
class ImageBank {
 public:
  explicit ImageBank(std::filesystem::path root = {}, sim::PipelineConfig cfg = {});

  void add(const std::string& id, const img::GrayImage& image);
  void add_processed(std::shared_ptr<const sim::ProcessedImage> image);
  std::shared_ptr<const sim::ProcessedImage> get(const std::string& id);
  const sim::PipelineConfig& pipeline() const noexcept { return cfg_; }

 private:
  std::filesystem::path root_;
  sim::PipelineConfig cfg_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const sim::ProcessedImage>> images_;
};

/// Memoized pair matches and reference sets, keyed by image ids.
class MatchCache {
 public:
  explicit MatchCache(ImageBank& bank) : bank_(bank) {}

  const sim::PairMatch& pair(const std::string& query, const std::string& train);
  std::shared_ptr<const sim::ReferenceSet> refset(const std::array<std::string, 3>& ids);
  /// Candidate matched against each member of the reference set.
  std::vector<sim::PairMatch> against(const std::string& candidate, const std::array<std::string, 3>& refs);
  ImageBank& bank() noexcept { return bank_; }

 private:
  ImageBank& bank_;
  std::mutex mutex_;
  std::map<std::pair<std::string, std::string>, std::unique_ptr<sim::PairMatch>> pairs_;
  std::map<std::array<std::string, 3>, std::shared_ptr<const sim::ReferenceSet>> refsets_;
};

}  // namespace trinket::eval
