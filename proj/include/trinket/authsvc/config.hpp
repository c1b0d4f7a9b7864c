#pragma once

#include <filesystem>
#include <string>

#include "trinket/common/kv_config.hpp"
#include "trinket/filters/filters.hpp"

namespace trinket::auth {

/// Service settings. Relative paths resolve against the working directory.
struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store_path = "trinket_store";
  std::filesystem::path model_path = "models/default_model.json";
  std::filesystem::path cbfilter_model_path;  // empty: no CBFilter
  double threshold = 0.5;
  int max_attempts = 3;
  filt::FilterRuleConfig filters;

  /// Throws FormatError on malformed or out-of-range values.
  static ServiceConfig from_kv(const KvConfig& kv);
  /// Reads the file (if given) and then applies TRINKET_* environment
  /// overrides, e.g. TRINKET_PORT or TRINKET_REF_AVG_CROSS_SIM_MIN.
  static ServiceConfig load(const std::filesystem::path& path = {});
};

}  // namespace trinket::auth
