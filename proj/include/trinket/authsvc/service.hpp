#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trinket/authsvc/config.hpp"
#include "trinket/authsvc/store.hpp"
#include "trinket/filters/filters.hpp"
#include "trinket/learn/model.hpp"
#include "trinket/simfeat/reference_set.hpp"

namespace trinket::auth {

/// Decodes an upload and center-crops it to the canonical frame. Throws
/// BadImage when undecodable or smaller than the frame.
img::GrayImage prepare_image(std::span<const std::uint8_t> bytes);

struct EnrollResult {
  bool accepted = false;
  std::vector<filt::Reason> feedback;
};

struct AuthDecision {
  bool accepted = false;
  double score = 0;  // 0 when a candidate rule rejected the image
  std::vector<filt::Reason> feedback;
  bool fallback_required = false;
};

/// Enrollment, authentication and reset over a RecordStore. Calls for one
/// user are serialized; different users proceed in parallel.
class AuthService {
 public:
  AuthService(ServiceConfig cfg, std::shared_ptr<RecordStore> store, learn::Model model,
              std::optional<filt::CbFilter> cbfilter = std::nullopt);

  /// File store and model files named by the config.
  static std::unique_ptr<AuthService> open(const ServiceConfig& cfg);

  /// Throws BadRequest unless exactly 3 images, BadImage, AlreadyEnrolled.
  EnrollResult enroll(const std::string& user, std::span<const std::vector<std::uint8_t>> images);
  /// Throws NotEnrolled, FallbackRequired when locked, BadImage.
  AuthDecision authenticate(const std::string& user, std::span<const std::uint8_t> image);
  /// Throws NotEnrolled.
  void reset(const std::string& user);

  const ServiceConfig& config() const noexcept { return cfg_; }
  const learn::Model& model() const noexcept { return model_; }
  bool has_cbfilter() const noexcept { return cbfilter_.has_value(); }

 private:
  std::shared_ptr<std::mutex> user_mutex(const std::string& user);
  std::shared_ptr<const sim::ReferenceSet> reference_set(const std::string& user);
  void check_user(const std::string& user) const;

  ServiceConfig cfg_;
  std::shared_ptr<RecordStore> store_;
  learn::Model model_;
  std::optional<filt::CbFilter> cbfilter_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> user_mutexes_;
  std::map<std::string, std::shared_ptr<const sim::ReferenceSet>> refsets_;
};

}  // namespace trinket::auth
