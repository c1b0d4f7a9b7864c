#include "trinket/authsvc/service.hpp"

#include "trinket/common/error.hpp"
#include "trinket/common/text.hpp"
#include "trinket/imgcore/image_io.hpp"
#include "trinket/simfeat/features.hpp"

namespace trinket::auth {

img::GrayImage prepare_image(std::span<const std::uint8_t> bytes) {
  auto im = img::decode_image(bytes);
  if (im.width() < sim::kCanonicalWidth || im.height() < sim::kCanonicalHeight) {
    throw Error(ErrorCode::BadImage, "image is " + std::to_string(im.width()) + "x" + std::to_string(im.height()) +
                                         ", needs at least " + std::to_string(sim::kCanonicalWidth) + "x" +
                                         std::to_string(sim::kCanonicalHeight));
  }
  if (im.width() == sim::kCanonicalWidth && im.height() == sim::kCanonicalHeight) return im;
  return img::crop_center(im, sim::kCanonicalWidth, sim::kCanonicalHeight);
}

namespace {

std::string codes_text(const std::vector<filt::Reason>& reasons) {
  std::string out;
  for (const auto& r : reasons) {
    if (!out.empty()) out += ',';
    out += filt::code_name(r.code);
  }
  return out;
}

}  // namespace

AuthService::AuthService(ServiceConfig cfg, std::shared_ptr<RecordStore> store, learn::Model model,
                         std::optional<filt::CbFilter> cbfilter)
    : cfg_(std::move(cfg)), store_(std::move(store)), model_(std::move(model)), cbfilter_(std::move(cbfilter)) {
  cfg_.filters.validate();
  const auto& names = model_.feature_names();
  if (names.empty() || names.size() > sim::kFeatureCount)
    throw Error(ErrorCode::FeatureWidthMismatch, "model expects " + std::to_string(names.size()) + " features");
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] != sim::kFeatureNames[i])
      throw Error(ErrorCode::FeatureWidthMismatch, "model feature " + std::to_string(i) + " is " + names[i]);
}

std::unique_ptr<AuthService> AuthService::open(const ServiceConfig& cfg) {
  auto store = std::make_shared<FileRecordStore>(cfg.store_path);
  std::optional<filt::CbFilter> cbf;
  if (!cfg.cbfilter_model_path.empty()) cbf = filt::CbFilter(learn::Model::load(cfg.cbfilter_model_path));
  return std::make_unique<AuthService>(cfg, std::move(store), learn::Model::load(cfg.model_path), std::move(cbf));
}

void AuthService::check_user(const std::string& user) const {
  if (!valid_user_id(user)) throw Error(ErrorCode::BadRequest, "invalid user id");
}

std::shared_ptr<std::mutex> AuthService::user_mutex(const std::string& user) {
  std::lock_guard lock(mutex_);
  auto& m = user_mutexes_[user];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::shared_ptr<const sim::ReferenceSet> AuthService::reference_set(const std::string& user) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = refsets_.find(user); it != refsets_.end()) return it->second;
  }
  const auto images = store_->load_images(user);
  std::vector<sim::ProcessedImage> processed;
  for (int i = 0; i < 3; ++i) processed.push_back(sim::process_image("ref" + std::to_string(i), images[i]));
  auto rs = std::make_shared<const sim::ReferenceSet>(sim::build_reference_set(std::move(processed)));
  std::lock_guard lock(mutex_);
  return refsets_[user] = std::move(rs);
}

EnrollResult AuthService::enroll(const std::string& user, std::span<const std::vector<std::uint8_t>> images) {
  check_user(user);
  if (images.size() != 3)
    throw Error(ErrorCode::BadRequest, "enrollment needs exactly 3 images, got " + std::to_string(images.size()));
  const auto guard = user_mutex(user);
  std::lock_guard lock(*guard);
  if (store_->load(user)) throw Error(ErrorCode::AlreadyEnrolled, user);

  std::array<img::GrayImage, 3> frames;
  std::vector<sim::ProcessedImage> processed;
  for (int i = 0; i < 3; ++i) {
    frames[i] = prepare_image(images[i]);
    processed.push_back(sim::process_image("ref" + std::to_string(i), frames[i]));
  }
  auto refset = std::make_shared<const sim::ReferenceSet>(sim::build_reference_set(std::move(processed)));
  auto verdict = filt::rbfilter_reference(*refset, cfg_.filters);
  if (cbfilter_) verdict.merge(cbfilter_->verdict(*refset));
  if (!verdict.accepted()) {
    store_->audit(user, "enroll-rejected " + codes_text(verdict.reasons));
    return {false, verdict.reasons};
  }

  UserRecord rec;
  rec.user_id = user;
  rec.enrolled_at = utc_timestamp();
  for (int i = 0; i < 3; ++i) rec.stats[i] = refset->member(i).stats;
  rec.template_idx = static_cast<int>(refset->stats().template_idx);
  rec.avg_cross_sim = refset->stats().avg_cross_sim;
  store_->create(rec, frames);
  {
    std::lock_guard l(mutex_);
    refsets_[user] = std::move(refset);
  }
  store_->audit(user, "enrolled");
  return {true, {}};
}

AuthDecision AuthService::authenticate(const std::string& user, std::span<const std::uint8_t> image) {
  check_user(user);
  const auto guard = user_mutex(user);
  std::lock_guard lock(*guard);
  auto rec = store_->load(user);
  if (!rec) throw Error(ErrorCode::NotEnrolled, user);
  if (rec->locked) throw Error(ErrorCode::FallbackRequired, user + " must use the fallback login");

  const auto candidate = sim::process_image("candidate", prepare_image(image));
  auto verdict = filt::rbfilter_candidate(candidate.stats, cfg_.filters);
  verdict.merge(filt::ubounds_candidate(candidate.stats, cfg_.filters));

  AuthDecision d;
  d.feedback = verdict.reasons;
  if (verdict.accepted()) {
    const auto refset = reference_set(user);
    const auto f = sim::extract_features(candidate, *refset);
    d.score = model_.predict_proba(std::span(f).first(model_.width()));
    d.accepted = d.score >= cfg_.threshold;
  }

  if (d.accepted) {
    if (rec->failures != 0) {
      rec->failures = 0;
      store_->update(*rec);
    }
  } else {
    rec->failures = std::min(rec->failures + 1, cfg_.max_attempts);
    rec->locked = rec->failures >= cfg_.max_attempts;
    store_->update(*rec);
  }
  d.fallback_required = rec->locked;
  store_->audit(user, std::string(d.accepted ? "auth-accepted" : "auth-rejected") + " score=" + format_double(d.score) +
                          (d.feedback.empty() ? "" : " " + codes_text(d.feedback)) +
                          (d.fallback_required ? " locked" : ""));
  return d;
}

void AuthService::reset(const std::string& user) {
  check_user(user);
  const auto guard = user_mutex(user);
  std::lock_guard lock(*guard);
  if (!store_->load(user)) throw Error(ErrorCode::NotEnrolled, user);
  store_->remove(user);
  {
    std::lock_guard l(mutex_);
    refsets_.erase(user);
  }
  store_->audit(user, "reset");
}

}  // namespace trinket::auth
