#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace trinket {

/// Flat `key = value` configuration. Lines starting with '#' are comments.
class KvConfig {
 public:
  static KvConfig load(const std::filesystem::path& path);
  static KvConfig parse(const std::string& text);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;

  /// Applies overrides from environment variables `<prefix><KEY>` where KEY is
  /// the upper-cased key with '.' replaced by '_'.
  void apply_env_overrides(const std::string& prefix, const std::initializer_list<const char*>& keys);

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace trinket
