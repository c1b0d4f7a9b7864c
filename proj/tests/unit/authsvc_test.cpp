#include <atomic>
#include <filesystem>
#include <map>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "support/check_error.hpp"
#include "support/source_dir.hpp"
#include "trinket/authsvc/base64.hpp"
#include "trinket/authsvc/http.hpp"
#include "trinket/authsvc/service.hpp"
#include "trinket/evalharness/crossval.hpp"
#include "trinket/evalharness/synth.hpp"
#include "trinket/imgcore/image_io.hpp"

using namespace trinket;
using namespace trinket::auth;
using test::code_of;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("trinket_auth_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

// 20 synthetic trinkets and an RF trained on one protocol subset of them.
struct World {
  eval::SynthCorpus synth = eval::synth_corpus({.n_trinkets = 20});
  std::map<std::string, img::GrayImage> images;
  learn::Model model;

  World() {
    eval::ImageBank bank;
    synth.add_to(bank);
    eval::MatchCache cache(bank);
    for (const auto& im : synth.images) images[im.id] = im.image;
    for (const auto& im : synth.negative_images) images[im.id] = im.image;
    const auto subsets = eval::generate_subsets(synth.corpus, 3, 1);
    std::vector<eval::AuthInstance> all;
    for (const auto& f : subsets[0].folds) all.insert(all.end(), f.instances.begin(), f.instances.end());
    learn::TrainParams p;
    p.forest.n_trees = 30;
    model = learn::train(learn::ModelKind::RandomForest, eval::feature_dataset(all, cache), p, 5);
  }

  std::vector<std::uint8_t> png(const std::string& id) const { return img::encode_png(images.at(id)); }
  std::vector<std::uint8_t> view(std::size_t trinket, int v) const {
    return png(synth.corpus.trinkets[trinket].images[v]);
  }
  std::vector<std::vector<std::uint8_t>> enrollment(std::size_t trinket) const {
    return {view(trinket, 1), view(trinket, 2), view(trinket, 3)};
  }
};

World& world() {
  static World w;
  return w;
}

ServiceConfig test_config(const fs::path& store) {
  auto kv = KvConfig::load(test::source_dir() / "configs/synth_filters.conf");
  auto cfg = ServiceConfig::from_kv(kv);
  cfg.store_path = store;
  return cfg;
}

AuthService make_service(const std::string& name) {
  const auto cfg = test_config(temp_dir(name));
  return AuthService(cfg, std::make_shared<FileRecordStore>(cfg.store_path), world().model);
}

std::vector<filt::FeedbackCode> codes(const std::vector<filt::Reason>& reasons) {
  filt::FilterVerdict v{reasons};
  return v.codes();
}

}  // namespace

TEST_CASE("base64 round trip and errors") {
  for (std::size_t n = 0; n < 10; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (std::size_t i = 0; i < n; ++i) bytes[i] = static_cast<std::uint8_t>(i * 37 + 250);
    CHECK(base64_decode(base64_encode(bytes)) == bytes);
  }
  CHECK(base64_encode(std::vector<std::uint8_t>{'M', 'a', 'n'}) == "TWFu");
  CHECK(base64_encode(std::vector<std::uint8_t>{'M'}) == "TQ==");
  CHECK(base64_decode("data:image/png;base64,TWFu") == std::vector<std::uint8_t>{'M', 'a', 'n'});
  CHECK(code_of([] { base64_decode("TWF"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { base64_decode("TW!u"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { base64_decode("T=Fu"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { base64_decode(" TWFu"); }) == ErrorCode::FormatError);
  CHECK(base64_decode("").empty());
}

TEST_CASE("config keys, validation and environment overrides") {
  const auto kv = KvConfig::parse("port = 9000\nthreshold = 0.7\nref_avg_cross_sim_min = 0.2\n");
  const auto c = ServiceConfig::from_kv(kv);
  CHECK(c.port == 9000);
  CHECK(c.threshold == 0.7);
  CHECK(c.filters.ref_avg_cross_sim_min == 0.2);
  CHECK(c.max_attempts == 3);
  CHECK(code_of([] { ServiceConfig::from_kv(KvConfig::parse("threshold = 2")); }) == ErrorCode::FormatError);
  CHECK(code_of([] { ServiceConfig::from_kv(KvConfig::parse("max_attempts = 0")); }) == ErrorCode::FormatError);

  setenv("TRINKET_MAX_ATTEMPTS", "5", 1);
  setenv("TRINKET_REF_KP_CNT_MIN", "42", 1);
  const auto e = ServiceConfig::load();
  unsetenv("TRINKET_MAX_ATTEMPTS");
  unsetenv("TRINKET_REF_KP_CNT_MIN");
  CHECK(e.max_attempts == 5);
  CHECK(e.filters.ref_kp_cnt_min == 42);
}

TEST_CASE("record JSON round trip and user ids") {
  UserRecord r;
  r.user_id = "alice_01";
  r.enrolled_at = "2024-01-02T03:04:05Z";
  r.failures = 2;
  r.stats[1] = {123, 45.5, 678, 9.25};
  r.template_idx = 2;
  r.avg_cross_sim = 0.4375;
  CHECK(record_from_json(record_to_json(r)) == r);
  CHECK(code_of([] { record_from_json("{\"user_id\": 3}"); }) == ErrorCode::FormatError);
  CHECK(valid_user_id("a.b-c_9"));
  CHECK_FALSE(valid_user_id(""));
  CHECK_FALSE(valid_user_id(".hidden"));
  CHECK_FALSE(valid_user_id("../etc"));
  CHECK_FALSE(valid_user_id(std::string(65, 'x')));
}

TEST_CASE("file store: staged create, atomic update, remove") {
  const auto root = temp_dir("store");
  FileRecordStore store(root);
  UserRecord r;
  r.user_id = "bob";
  const std::array<img::GrayImage, 3> ims = {img::GrayImage(8, 8, 10), img::GrayImage(8, 8, 20),
                                             img::GrayImage(8, 8, 30)};
  store.create(r, ims);
  CHECK(store.load("bob") == r);
  CHECK(store.load_images("bob") == ims);
  CHECK(code_of([&] { store.create(r, ims); }) == ErrorCode::AlreadyEnrolled);

  // A failed write leaves neither the user nor a staging directory behind.
  UserRecord broken;
  broken.user_id = "carol";
  CHECK_THROWS(store.create(broken, {img::GrayImage(8, 8), img::GrayImage(), img::GrayImage(8, 8)}));
  CHECK_FALSE(store.load("carol"));
  for (const auto& entry : fs::directory_iterator(root)) CHECK(entry.path().filename().string()[0] != '.');

  r.failures = 2;
  store.update(r);
  CHECK(store.load("bob")->failures == 2);
  store.remove("bob");
  CHECK_FALSE(store.load("bob"));
  CHECK(code_of([&] { store.remove("bob"); }) == ErrorCode::NotEnrolled);
  CHECK(code_of([&] { store.update(r); }) == ErrorCode::NotEnrolled);
  CHECK(code_of([&] { store.load("../x"); }) == ErrorCode::BadRequest);
}

TEST_CASE("image preparation") {
  const img::GrayImage big(300, 400, 7);
  CHECK(prepare_image(img::encode_png(big)).width() == sim::kCanonicalWidth);
  CHECK(prepare_image(img::encode_png(big)).height() == sim::kCanonicalHeight);
  CHECK(code_of([] { prepare_image(img::encode_png(img::GrayImage(100, 400))); }) == ErrorCode::BadImage);
  const std::vector<std::uint8_t> junk = {1, 2, 3};
  CHECK(code_of([&] { prepare_image(junk); }) == ErrorCode::BadImage);
}

TEST_CASE("enrollment outcomes and feedback codes") {
  auto& w = world();
  auto svc = make_service("enroll");

  const auto ok = svc.enroll("u0", w.enrollment(0));
  CHECK(ok.accepted);
  CHECK(ok.feedback.empty());
  CHECK(code_of([&] { svc.enroll("u0", w.enrollment(0)); }) == ErrorCode::AlreadyEnrolled);

  const std::vector<std::vector<std::uint8_t>> mixed = {w.view(1, 1), w.view(2, 1), w.view(3, 1)};
  const auto nonident = svc.enroll("u1", mixed);
  CHECK_FALSE(nonident.accepted);
  CHECK(codes(nonident.feedback) == std::vector{filt::FeedbackCode::NonIdenticalTrinkets});

  const auto& plain = w.synth.negatives[0];
  const auto low = svc.enroll("u2", std::vector{w.png(plain.images[0]), w.png(plain.images[1]), w.png(plain.images[2])});
  CHECK_FALSE(low.accepted);
  REQUIRE_FALSE(low.feedback.empty());
  CHECK(codes(low.feedback)[0] == filt::FeedbackCode::LowQualityOrPlain);
  // Rejected enrollments persist nothing.
  CHECK(code_of([&] { svc.authenticate("u1", w.view(1, 0)); }) == ErrorCode::NotEnrolled);

  CHECK(code_of([&] { svc.enroll("u3", std::vector{w.view(4, 1), w.view(4, 2)}); }) == ErrorCode::BadRequest);
  CHECK(code_of([&] { svc.enroll("bad/id", w.enrollment(4)); }) == ErrorCode::BadRequest);
}

TEST_CASE("authentication, lockout after three failures, reset") {
  auto& w = world();
  auto svc = make_service("auth");
  REQUIRE(svc.enroll("u5", w.enrollment(5)).accepted);

  const auto genuine = svc.authenticate("u5", w.view(5, 0));
  CHECK(genuine.accepted);
  CHECK(genuine.score >= 0.5);
  CHECK_FALSE(genuine.fallback_required);

  for (int i = 1; i <= 3; ++i) {
    const auto fraud = svc.authenticate("u5", w.view(6 + i, 0));
    CHECK_FALSE(fraud.accepted);
    CHECK(fraud.fallback_required == (i == 3));
  }
  CHECK(code_of([&] { svc.authenticate("u5", w.view(5, 0)); }) == ErrorCode::FallbackRequired);

  svc.reset("u5");
  CHECK(code_of([&] { svc.authenticate("u5", w.view(5, 0)); }) == ErrorCode::NotEnrolled);
  CHECK(code_of([&] { svc.reset("u5"); }) == ErrorCode::NotEnrolled);
  REQUIRE(svc.enroll("u5", w.enrollment(5)).accepted);
  CHECK(svc.authenticate("u5", w.view(5, 0)).accepted);
}

TEST_CASE("a success clears the failure counter") {
  auto& w = world();
  auto svc = make_service("clear");
  REQUIRE(svc.enroll("u6", w.enrollment(6)).accepted);
  for (int round = 0; round < 3; ++round) {
    CHECK_FALSE(svc.authenticate("u6", w.view(12, 0)).accepted);
    CHECK_FALSE(svc.authenticate("u6", w.view(13, 0)).accepted);
    CHECK(svc.authenticate("u6", w.view(6, 0)).accepted);
  }
}

TEST_CASE("candidate rules reject with feedback and count as failures") {
  auto& w = world();
  auto svc = make_service("candidate");
  REQUIRE(svc.enroll("u7", w.enrollment(7)).accepted);
  const auto& blurry = w.synth.negatives.back();
  const auto d = svc.authenticate("u7", w.png(blurry.images[0]));
  CHECK_FALSE(d.accepted);
  CHECK(d.score == 0);
  REQUIRE_FALSE(d.feedback.empty());
  CHECK(codes(d.feedback)[0] == filt::FeedbackCode::LowQualityOrPlain);
}

TEST_CASE("state survives a service restart") {
  auto& w = world();
  const auto cfg = test_config(temp_dir("restart"));
  {
    AuthService svc(cfg, std::make_shared<FileRecordStore>(cfg.store_path), w.model);
    REQUIRE(svc.enroll("u8", w.enrollment(8)).accepted);
    CHECK_FALSE(svc.authenticate("u8", w.view(9, 0)).accepted);
  }
  AuthService svc(cfg, std::make_shared<FileRecordStore>(cfg.store_path), w.model);
  CHECK(svc.authenticate("u8", w.view(8, 0)).accepted);
  const auto log = read_text(cfg.store_path / "audit.log");
  CHECK(log.find("u8 enrolled") != std::string::npos);
  CHECK(log.find("u8 auth-rejected") != std::string::npos);
  CHECK(log.find("u8 auth-accepted") != std::string::npos);
}

TEST_CASE("models must follow the frozen feature layout") {
  auto& w = world();
  const auto cfg = test_config(temp_dir("layout"));
  learn::Dataset ds({"x", "y"});
  ds.add(std::vector<double>{0, 0}, 0);
  ds.add(std::vector<double>{1, 1}, 1);
  const auto odd = learn::train(learn::ModelKind::Tree, ds, {}, 1);
  CHECK(code_of([&] { AuthService(cfg, std::make_shared<FileRecordStore>(cfg.store_path), odd); }) ==
        ErrorCode::FeatureWidthMismatch);
  CHECK(w.model.width() == sim::kFeatureCount);
}

TEST_CASE("bundled default model") {
  const auto m = learn::Model::load(test::source_dir() / "models/default_model.json");
  REQUIRE(m.width() == sim::kFeatureCount);
  for (std::size_t i = 0; i < m.width(); ++i) CHECK(m.feature_names()[i] == sim::kFeatureNames[i]);
}

TEST_CASE("HTTP handler: routes, bodies and status codes") {
  auto& w = world();
  auto svc = make_service("http");
  auto b64 = [](const std::vector<std::uint8_t>& v) { return base64_encode(v); };

  auto r = handle_request(svc, "GET", "/healthz", "");
  CHECK(r.status == 200);
  CHECK(json::parse(r.body)["status"] == "ok");

  const json enroll = {{"images", {b64(w.view(10, 1)), b64(w.view(10, 2)), b64(w.view(10, 3))}}};
  r = handle_request(svc, "POST", "/users/h10/enroll", enroll.dump());
  REQUIRE(r.status == 200);
  CHECK(json::parse(r.body)["status"] == "enrolled");
  CHECK(handle_request(svc, "POST", "/users/h10/enroll", enroll.dump()).status == 409);

  r = handle_request(svc, "POST", "/users/h10/authenticate", json{{"image", b64(w.view(10, 0))}}.dump());
  REQUIRE(r.status == 200);
  auto j = json::parse(r.body);
  CHECK(j["accepted"] == true);
  CHECK(j["fallback_required"] == false);
  CHECK(j["score"].get<double>() >= 0.5);

  const json mixed = {{"images", {b64(w.view(1, 1)), b64(w.view(2, 1)), b64(w.view(3, 1))}}};
  r = handle_request(svc, "POST", "/users/h1/enroll", mixed.dump());
  REQUIRE(r.status == 422);
  j = json::parse(r.body);
  CHECK(j["status"] == "rejected");
  CHECK(j["feedback"][0]["code"] == "NON_IDENTICAL_TRINKETS");
  CHECK_FALSE(j["feedback"][0]["message"].get<std::string>().empty());

  for (int i = 0; i < 3; ++i)
    handle_request(svc, "POST", "/users/h10/authenticate", json{{"image", b64(w.view(11 + i, 0))}}.dump());
  r = handle_request(svc, "POST", "/users/h10/authenticate", json{{"image", b64(w.view(10, 0))}}.dump());
  CHECK(r.status == 423);
  CHECK(json::parse(r.body)["error"] == "FallbackRequired");

  CHECK(handle_request(svc, "POST", "/users/h10/reset", "").status == 200);
  r = handle_request(svc, "POST", "/users/h10/authenticate", json{{"image", b64(w.view(10, 0))}}.dump());
  CHECK(r.status == 404);
  CHECK(json::parse(r.body)["error"] == "NotEnrolled");

  CHECK(handle_request(svc, "POST", "/users/h2/enroll", "{not json").status == 400);
  CHECK(handle_request(svc, "POST", "/users/h2/enroll", json{{"images", {"a", "b"}}}.dump()).status == 400);
  CHECK(handle_request(svc, "POST", "/users/h2/authenticate", json{{"image", "%%%"}}.dump()).status == 400);
  const json enroll15 = {{"images", {b64(w.view(15, 1)), b64(w.view(15, 2)), b64(w.view(15, 3))}}};
  REQUIRE(handle_request(svc, "POST", "/users/h15/enroll", enroll15.dump()).status == 200);
  r = handle_request(svc, "POST", "/users/h15/authenticate", json{{"image", b64({1, 2, 3})}}.dump());
  CHECK(r.status == 400);
  CHECK(json::parse(r.body)["error"] == "BadImage");
  CHECK(handle_request(svc, "GET", "/users/h2/authenticate", "").status == 405);
  CHECK(handle_request(svc, "POST", "/users/h2/explode", "").status == 404);
  CHECK(handle_request(svc, "GET", "/nowhere", "").status == 404);
}

TEST_CASE("HTTP server round trip") {
  auto& w = world();
  auto svc = make_service("server");
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread t([&] { server.run(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);
  const json enroll = {{"images",
                        {base64_encode(w.view(14, 1)), base64_encode(w.view(14, 2)), base64_encode(w.view(14, 3))}}};
  auto res = client.Post("/users/s14/enroll", enroll.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  res = client.Post("/users/s14/authenticate", json{{"image", base64_encode(w.view(14, 0))}}.dump(),
                    "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["accepted"] == true);
  res = client.Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  server.stop();
  t.join();
}
