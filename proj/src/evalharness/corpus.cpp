#include "trinket/evalharness/corpus.hpp"

#include <set>
#include <sstream>

#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/common/text.hpp"
#include "trinket/imgcore/image_io.hpp"

namespace trinket::eval {

TrinketCorpus read_manifest(const std::filesystem::path& path) {
  TrinketCorpus c;
  c.root = path.parent_path();
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);  // header
  std::set<std::string> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 6 || cols[0].empty())
      throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
    if (!seen.insert(cols[0]).second) throw Error(ErrorCode::ShapeError, "duplicate trinket id " + cols[0]);
    TrinketEntry t{cols[0], cols[1], {cols[2], cols[3], cols[4], cols[5]}};
    c.trinkets.push_back(std::move(t));
  }
  return c;
}

void write_manifest(const TrinketCorpus& corpus, const std::filesystem::path& path) {
  std::string out = "trinket_id,category,image1,image2,image3,image4\n";
  for (const auto& t : corpus.trinkets) {
    out += t.id + "," + t.category;
    for (const auto& im : t.images) out += "," + im;
    out += "\n";
  }
  write_text_atomic(path, out);
}

ImageBank::ImageBank(std::filesystem::path root, sim::PipelineConfig cfg) : root_(std::move(root)), cfg_(cfg) {}

void ImageBank::add(const std::string& id, const img::GrayImage& image) {
  add_processed(std::make_shared<const sim::ProcessedImage>(sim::process_image(id, image, cfg_)));
}

void ImageBank::add_processed(std::shared_ptr<const sim::ProcessedImage> image) {
  std::lock_guard lock(mutex_);
  images_[image->id] = std::move(image);
}

std::shared_ptr<const sim::ProcessedImage> ImageBank::get(const std::string& id) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = images_.find(id); it != images_.end()) return it->second;
  }
  auto im = img::read_image(root_ / id);
  if (im.width() > sim::kCanonicalWidth && im.height() > sim::kCanonicalHeight)
    im = img::crop_center(im, sim::kCanonicalWidth, sim::kCanonicalHeight);
  auto p = std::make_shared<const sim::ProcessedImage>(sim::process_image(id, im, cfg_));
  std::lock_guard lock(mutex_);
  return images_.emplace(id, std::move(p)).first->second;
}

const sim::PairMatch& MatchCache::pair(const std::string& query, const std::string& train) {
  const auto key = std::make_pair(query, train);
  {
    std::lock_guard lock(mutex_);
    if (auto it = pairs_.find(key); it != pairs_.end()) return *it->second;
  }
  auto pm = std::make_unique<sim::PairMatch>(sim::match_pair(*bank_.get(query), *bank_.get(train),
                                                             bank_.pipeline().ransac));
  std::lock_guard lock(mutex_);
  return *pairs_.emplace(key, std::move(pm)).first->second;
}

std::shared_ptr<const sim::ReferenceSet> MatchCache::refset(const std::array<std::string, 3>& ids) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = refsets_.find(ids); it != refsets_.end()) return it->second;
  }
  std::vector<sim::ReferenceSet::ImagePtr> images;
  for (const auto& id : ids) images.push_back(bank_.get(id));
  sim::SimMatrix s(3, std::vector<double>(3, 0.0));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) s[i][j] = pair(ids[i], ids[j]).similarity;
  auto rs = std::make_shared<const sim::ReferenceSet>(std::move(images), std::move(s));
  std::lock_guard lock(mutex_);
  return refsets_.emplace(ids, std::move(rs)).first->second;
}

std::vector<sim::PairMatch> MatchCache::against(const std::string& candidate, const std::array<std::string, 3>& refs) {
  std::vector<sim::PairMatch> out;
  for (const auto& r : refs) out.push_back(pair(candidate, r));
  return out;
}

}  // namespace trinket::eval
