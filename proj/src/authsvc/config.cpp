#include "trinket/authsvc/config.hpp"

#include "trinket/common/error.hpp"

namespace trinket::auth {

ServiceConfig ServiceConfig::from_kv(const KvConfig& kv) {
  ServiceConfig c;
  c.host = kv.get_or("host", c.host);
  c.port = static_cast<int>(kv.get_int("port", c.port));
  c.store_path = kv.get_or("store_path", c.store_path.string());
  c.model_path = kv.get_or("model_path", c.model_path.string());
  c.cbfilter_model_path = kv.get_or("cbfilter_model_path", c.cbfilter_model_path.string());
  c.threshold = kv.get_double("threshold", c.threshold);
  c.max_attempts = static_cast<int>(kv.get_int("max_attempts", c.max_attempts));
  c.filters = filt::FilterRuleConfig::from_kv(kv);
  if (c.port < 0 || c.port > 65535) throw Error(ErrorCode::FormatError, "port out of range");
  if (!(c.threshold >= 0 && c.threshold <= 1)) throw Error(ErrorCode::FormatError, "threshold must lie in [0, 1]");
  if (c.max_attempts < 1) throw Error(ErrorCode::FormatError, "max_attempts must be positive");
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  KvConfig kv = path.empty() ? KvConfig{} : KvConfig::load(path);
  kv.apply_env_overrides("TRINKET_", {"host", "port", "store_path", "model_path", "cbfilter_model_path", "threshold",
                                      "max_attempts", "ref_kp_cnt_min", "ref_dtc_kp_min", "ref_avg_cross_sim_min",
                                      "cand_kp_cnt_min", "cand_dtc_kp_max", "cand_white_cnt_max",
                                      "cand_dtc_white_max"});
  return from_kv(kv);
}

}  // namespace trinket::auth
