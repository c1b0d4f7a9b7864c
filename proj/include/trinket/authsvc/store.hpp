#pragma once

#include <array>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "trinket/imgcore/gray_image.hpp"
#include "trinket/simfeat/processed_image.hpp"

namespace trinket::auth {

struct UserRecord {
  std::string user_id;
  std::string enrolled_at;  // ISO 8601, UTC
  int failures = 0;
  bool locked = false;
  // Cached at enrollment.
  std::array<sim::ImageStats, 3> stats{};
  int template_idx = 0;
  double avg_cross_sim = 0;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

std::string record_to_json(const UserRecord& r);
/// Throws FormatError.
UserRecord record_from_json(std::string_view text);

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

/// 1-64 characters from [A-Za-z0-9_.-], not starting with '.'.
bool valid_user_id(std::string_view id);

/// Persistence boundary of the service; implementations must make create,
/// update and remove atomic.
class RecordStore {
 public:
  virtual ~RecordStore() = default;
  virtual std::optional<UserRecord> load(const std::string& user) = 0;
  virtual std::array<img::GrayImage, 3> load_images(const std::string& user) = 0;
  virtual void create(const UserRecord& record, const std::array<img::GrayImage, 3>& images) = 0;
  virtual void update(const UserRecord& record) = 0;
  virtual void remove(const std::string& user) = 0;
  virtual void audit(const std::string& user, std::string_view event) = 0;
};

/// One directory per user holding ref0-2.png and record.json. New users are
/// staged in a hidden sibling directory and renamed into place; removed
/// users are renamed away before deletion. audit.log collects events.
class FileRecordStore : public RecordStore {
 public:
  explicit FileRecordStore(std::filesystem::path root);

  std::optional<UserRecord> load(const std::string& user) override;
  std::array<img::GrayImage, 3> load_images(const std::string& user) override;
  void create(const UserRecord& record, const std::array<img::GrayImage, 3>& images) override;
  void update(const UserRecord& record) override;
  void remove(const std::string& user) override;
  void audit(const std::string& user, std::string_view event) override;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path user_dir(const std::string& user) const;
  std::filesystem::path scratch(std::string_view kind, const std::string& user);

  std::filesystem::path root_;
  std::mutex audit_mutex_;
  std::mutex scratch_mutex_;
  unsigned long long scratch_serial_ = 0;
};

}  // namespace trinket::auth
