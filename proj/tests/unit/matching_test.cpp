#include <set>

#include "doctest.h"
#include "support/check_error.hpp"
#include "support/geometry.hpp"
#include "trinket/matching/homography.hpp"
#include "trinket/matching/matcher.hpp"

using namespace trinket;
using kp::BinaryDescriptor;
using test::code_of;

namespace {

BinaryDescriptor random_descriptor(Rng& rng) {
  BinaryDescriptor d;
  for (auto& w : d.bits) w = rng();
  return d;
}

std::vector<BinaryDescriptor> random_descriptors(Rng& rng, int n) {
  std::vector<BinaryDescriptor> v;
  for (int i = 0; i < n; ++i) v.push_back(random_descriptor(rng));
  return v;
}

}  // namespace

TEST_CASE("identical descriptor sets match themselves") {
  Rng rng(1);
  const auto d = random_descriptors(rng, 40);
  const auto m = match::match_bruteforce(d, d);
  REQUIRE(m.size() == 40);
  for (int i = 0; i < 40; ++i) CHECK(m[i] == match::Match{i, i, 0});
}

TEST_CASE("nearest neighbour by Hamming distance") {
  Rng rng(2);
  const auto d = random_descriptor(rng);
  auto one = d, three = d;
  one.flip(17);
  three.flip(3);
  three.flip(100);
  three.flip(200);
  const std::vector<BinaryDescriptor> a = {d};
  const std::vector<BinaryDescriptor> b = {one, three};
  const auto m = match::match_bruteforce(a, b);
  REQUIRE(m.size() == 1);
  CHECK(m[0] == match::Match{0, 0, 1});
}

TEST_CASE("empty inputs") {
  Rng rng(3);
  const auto d = random_descriptors(rng, 5);
  CHECK(match::match_bruteforce({}, d).empty());
  CHECK(match::match_bruteforce(d, {}).empty());
}

TEST_CASE("ties resolve to the lowest train index") {
  Rng rng(4);
  const auto d = random_descriptor(rng);
  const std::vector<BinaryDescriptor> a = {d};
  const std::vector<BinaryDescriptor> b = {random_descriptor(rng), d, d};
  const auto m = match::match_bruteforce(a, b);
  REQUIRE(m.size() == 1);
  CHECK(m[0].train_idx == 1);
}

TEST_CASE("cross-checked matching is one-to-one and mutually nearest") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    auto a = random_descriptors(rng, 30 + static_cast<int>(uniform_index(rng, 30)));
    auto b = random_descriptors(rng, 30 + static_cast<int>(uniform_index(rng, 30)));
    // Plant some near-duplicates so matches exist.
    for (int i = 0; i < 10; ++i) {
      b[i] = a[i + 3];
      b[i].flip(static_cast<int>(uniform_index(rng, 256)));
    }
    const auto m = match::match_bruteforce(a, b);
    std::set<int> qs, ts;
    for (const auto& x : m) {
      CHECK(qs.insert(x.query_idx).second);
      CHECK(ts.insert(x.train_idx).second);
      CHECK(x.distance == kp::hamming(a[x.query_idx], b[x.train_idx]));
      for (const auto& other : b) CHECK(kp::hamming(a[x.query_idx], other) >= x.distance);
      for (const auto& other : a) CHECK(kp::hamming(other, b[x.train_idx]) >= x.distance);
    }
  }
}

TEST_CASE("RANSAC on the identity map") {
  std::vector<match::Point2> pts = {{10, 10}, {200, 15}, {30, 250}, {180, 290}, {120, 140},
                                    {60, 90}, {240, 200}, {90, 30}};
  const auto r = match::estimate_homography_ransac(pts, pts, {}, 7);
  CHECK(r.homography.max_abs_diff(match::Homography::identity()) < 1e-9);
  CHECK(r.inlier_count == 8);
}

TEST_CASE("RANSAC recovers a planted homography among outliers") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto p = test::planted_points(rng, 50, 20);
    const auto r = match::estimate_homography_ransac(p.a, p.b, {}, seed);
    CHECK(r.homography.max_abs_diff(p.truth) < 1e-2);
    int flagged = 0;
    for (std::size_t i = 0; i < p.a.size(); ++i) flagged += p.is_inlier[i] && r.inlier_mask[i];
    CHECK(flagged >= 48);
  }
}

TEST_CASE("RANSAC invariants: seeded determinism and inlier errors below threshold") {
  Rng rng(99);
  const auto p = test::planted_points(rng, 30, 30);
  match::RansacConfig cfg;
  const auto r1 = match::estimate_homography_ransac(p.a, p.b, cfg, 5);
  const auto r2 = match::estimate_homography_ransac(p.a, p.b, cfg, 5);
  CHECK(r1.homography.matrix() == r2.homography.matrix());
  CHECK(r1.inlier_mask == r2.inlier_mask);
  const auto inv = r1.homography.inverse();
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    if (r1.inlier_mask[i]) CHECK(match::symmetric_transfer_error(r1.homography, inv, p.a[i], p.b[i]) < cfg.reproj_thresh);
  }
}

TEST_CASE("RANSAC error paths") {
  std::vector<match::Point2> three = {{0, 0}, {1, 0}, {0, 1}};
  CHECK(code_of([&] { match::estimate_homography_ransac(three, three, {}, 1); }) == ErrorCode::NotEnoughMatches);
  std::vector<match::Point2> line = {{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
  CHECK(code_of([&] { match::estimate_homography_ransac(line, line, {}, 1); }) == ErrorCode::DegenerateGeometry);
}

TEST_CASE("filter_matches") {
  SUBCASE("below four matches") {
    std::vector<kp::Keypoint> k(3);
    std::vector<match::Match> m = {{0, 0, 0}, {1, 1, 0}};
    const auto f = match::filter_matches(m, k, k, {}, 1);
    CHECK(f.inliers.empty());
    CHECK(f.homography.degenerate());
  }
  SUBCASE("planted pair with 30% decoys") {
    Rng rng(17);
    const auto p = test::planted_points(rng, 70, 30);
    std::vector<kp::Keypoint> ka, kb;
    std::vector<match::Match> m;
    for (std::size_t i = 0; i < p.a.size(); ++i) {
      ka.push_back({static_cast<float>(p.a[i].x), static_cast<float>(p.a[i].y)});
      kb.push_back({static_cast<float>(p.b[i].x), static_cast<float>(p.b[i].y)});
      m.push_back({static_cast<int>(i), static_cast<int>(i), 10});
    }
    const auto f = match::filter_matches(m, ka, kb, {}, 3);
    REQUIRE(!f.homography.degenerate());
    // Ground truth: the planted correspondences plus any decoy that happens to
    // agree with the true map to within the threshold.
    const auto inv = p.truth.inverse();
    std::set<int> expected, got;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const match::Point2 a{ka[i].x, ka[i].y}, b{kb[i].x, kb[i].y};
      if (match::symmetric_transfer_error(p.truth, inv, a, b) < 3.0) expected.insert(static_cast<int>(i));
    }
    for (const auto& x : f.inliers) got.insert(x.query_idx);
    CHECK(got == expected);
  }
}
