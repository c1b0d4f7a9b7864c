#include "trinket/authsvc/store.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "json.hpp"
#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/imgcore/image_io.hpp"

namespace trinket::auth {

namespace fs = std::filesystem;
using nlohmann::json;

std::string record_to_json(const UserRecord& r) {
  json stats = json::array();
  for (const auto& s : r.stats)
    stats.push_back({{"kp_cnt", s.kp_cnt}, {"dtc_kp", s.dtc_kp}, {"white_cnt", s.white_cnt}, {"dtc_white", s.dtc_white}});
  json j = {{"user_id", r.user_id},   {"enrolled_at", r.enrolled_at},   {"failures", r.failures},
            {"locked", r.locked},     {"template_idx", r.template_idx}, {"avg_cross_sim", r.avg_cross_sim},
            {"stats", stats}};
  return j.dump(2) + "\n";
}

UserRecord record_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    UserRecord r;
    r.user_id = j.at("user_id").get<std::string>();
    r.enrolled_at = j.at("enrolled_at").get<std::string>();
    r.failures = j.at("failures").get<int>();
    r.locked = j.at("locked").get<bool>();
    r.template_idx = j.at("template_idx").get<int>();
    r.avg_cross_sim = j.at("avg_cross_sim").get<double>();
    const auto& stats = j.at("stats");
    if (!stats.is_array() || stats.size() != 3) throw Error(ErrorCode::FormatError, "record needs 3 image stats");
    for (int i = 0; i < 3; ++i) {
      const auto& s = stats[i];
      r.stats[i] = {s.at("kp_cnt").get<double>(), s.at("dtc_kp").get<double>(), s.at("white_cnt").get<double>(),
                    s.at("dtc_white").get<double>()};
    }
    if (r.template_idx < 0 || r.template_idx > 2 || r.failures < 0)
      throw Error(ErrorCode::FormatError, "record fields out of range");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("user record: ") + e.what());
  }
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return stamp;
}

bool valid_user_id(std::string_view id) {
  if (id.empty() || id.size() > 64 || id[0] == '.') return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

FileRecordStore::FileRecordStore(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create store " + root_.string() + ": " + ec.message());
}

fs::path FileRecordStore::user_dir(const std::string& user) const {
  if (!valid_user_id(user)) throw Error(ErrorCode::BadRequest, "invalid user id");
  return root_ / user;
}

fs::path FileRecordStore::scratch(std::string_view kind, const std::string& user) {
  std::lock_guard lock(scratch_mutex_);
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  return root_ / ("." + std::string(kind) + "-" + user + "-" + std::to_string(stamp) + "-" +
                  std::to_string(scratch_serial_++));
}

std::optional<UserRecord> FileRecordStore::load(const std::string& user) {
  const auto path = user_dir(user) / "record.json";
  if (!fs::exists(path)) return std::nullopt;
  return record_from_json(read_text(path));
}

std::array<img::GrayImage, 3> FileRecordStore::load_images(const std::string& user) {
  const auto dir = user_dir(user);
  std::array<img::GrayImage, 3> out;
  for (int i = 0; i < 3; ++i) out[i] = img::read_image(dir / ("ref" + std::to_string(i) + ".png"));
  return out;
}

void FileRecordStore::create(const UserRecord& record, const std::array<img::GrayImage, 3>& images) {
  const auto dir = user_dir(record.user_id);
  if (fs::exists(dir)) throw Error(ErrorCode::AlreadyEnrolled, record.user_id);
  const auto stage = scratch("staging", record.user_id);
  fs::create_directories(stage);
  try {
    for (int i = 0; i < 3; ++i) img::write_png(images[i], stage / ("ref" + std::to_string(i) + ".png"));
    write_text_atomic(stage / "record.json", record_to_json(record));
    fs::rename(stage, dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(stage, ec);
    throw;
  }
}

void FileRecordStore::update(const UserRecord& record) {
  const auto dir = user_dir(record.user_id);
  if (!fs::exists(dir / "record.json")) throw Error(ErrorCode::NotEnrolled, record.user_id);
  write_text_atomic(dir / "record.json", record_to_json(record));
}

void FileRecordStore::remove(const std::string& user) {
  const auto dir = user_dir(user);
  if (!fs::exists(dir)) throw Error(ErrorCode::NotEnrolled, user);
  const auto trash = scratch("removed", user);
  fs::rename(dir, trash);
  std::error_code ec;
  fs::remove_all(trash, ec);
}

void FileRecordStore::audit(const std::string& user, std::string_view event) {
  const auto stamp = utc_timestamp();
  std::lock_guard lock(audit_mutex_);
  std::ofstream out(root_ / "audit.log", std::ios::app);
  out << stamp << ' ' << user << ' ' << event << '\n';
  if (!out) throw Error(ErrorCode::IoError, "cannot append to audit log");
}

}  // namespace trinket::auth
