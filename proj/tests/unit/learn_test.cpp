#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "support/check_error.hpp"
#include "trinket/common/rng.hpp"
#include "trinket/learn/metrics.hpp"
#include "trinket/learn/model.hpp"

using namespace trinket;
using namespace trinket::learn;
using test::code_of;

namespace {

Dataset separable(std::uint64_t seed, int n = 200) {
  Rng rng(seed);
  Dataset ds({"a", "b"});
  while (ds.rows() < static_cast<std::size_t>(n)) {
    const double a = uniform_real(rng, -1, 1), b = uniform_real(rng, -1, 1);
    // margin band |a + b| < 0.5 left empty
    if (std::abs(a + b) < 0.5) continue;
    const double row[] = {a, b};
    ds.add(row, a + b > 0 ? 1 : 0);
  }
  return ds;
}

// Four Gaussian clusters at (+-1, +-1); label = same sign quadrant.
Dataset xor_set(std::uint64_t seed, int n = 400) {
  Rng rng(seed);
  Dataset ds({"x", "y"});
  for (int i = 0; i < n; ++i) {
    const int q = i % 4;
    const double cx = q & 1 ? 1.0 : -1.0, cy = q & 2 ? 1.0 : -1.0;
    const double row[] = {cx + 0.25 * standard_normal(rng), cy + 0.25 * standard_normal(rng)};
    ds.add(row, cx * cy > 0 ? 1 : 0);
  }
  return ds;
}

double accuracy(const Model& m, const Dataset& ds) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < ds.rows(); ++i) ok += (m.predict_proba(ds.row(i)) >= 0.5) == (ds.label(i) == 1);
  return static_cast<double>(ok) / ds.rows();
}

std::string leaf_forest_json(int genuine_votes, int total) {
  std::string trees;
  for (int t = 0; t < total; ++t) {
    if (t) trees += ",";
    trees += t < genuine_votes ? "[[-1,0,-1,-1,1.0]]" : "[[-1,0,-1,-1,0.0]]";
  }
  return R"({"format":"trinket-model","version":1,"kind":"rf","seed":0,"feature_names":["a"],"trees":[)" + trees +
         "]}";
}

// Direct O(n^2) threshold sweep: evaluate FAR/FRR at each distinct score
// by counting, then interpolate across the first sign change.
double eer_oracle(const std::vector<Scored>& s) {
  std::vector<double> ts;
  for (const auto& x : s) ts.push_back(x.score);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  ts.push_back(std::nextafter(ts.back(), 1e300));
  double prev_far = 0, prev_frr = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    double fa = 0, nf = 0, fr = 0, ng = 0;
    for (const auto& x : s) {
      if (x.label) {
        ng++;
        fr += x.score < ts[k];
      } else {
        nf++;
        fa += x.score >= ts[k];
      }
    }
    const double far = 100 * fa / nf, frr = 100 * fr / ng;
    if (frr == far) return far;
    if (frr > far) {
      const double d0 = prev_frr - prev_far, d1 = frr - far;
      return prev_far + d0 / (d0 - d1) * (far - prev_far);
    }
    prev_far = far;
    prev_frr = frr;
  }
  return -1;
}

}  // namespace

TEST_CASE("dataset bookkeeping and validation") {
  Dataset ds({"a", "b"});
  const double r[] = {1, 2};
  ds.add(r, 1);
  ds.add(r, 0);
  CHECK(ds.rows() == 2);
  CHECK(ds.count_label(1) == 1);
  const double bad[] = {1};
  CHECK(code_of([&] { ds.add(bad, 0); }) == ErrorCode::FeatureWidthMismatch);
  const double nan[] = {1, std::nan("")};
  CHECK(code_of([&] { ds.add(nan, 0); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { ds.add(r, 2); }) == ErrorCode::FormatError);
  const auto h = ds.head_columns(1);
  CHECK(h.width() == 1);
  CHECK(h.row(1)[0] == 1);
}

TEST_CASE("dataset CSV round trip is exact") {
  auto ds = xor_set(1, 40);
  const auto back = parse_csv(to_csv(ds));
  REQUIRE(back.rows() == ds.rows());
  CHECK(back.feature_names() == ds.feature_names());
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    CHECK(back.label(i) == ds.label(i));
    for (std::size_t c = 0; c < ds.width(); ++c) CHECK(back.row(i)[c] == ds.row(i)[c]);
  }
  CHECK(code_of([] { parse_csv("a,b\n1,2\n"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_csv("a,label\n1,2,3\n"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { parse_csv("a,label\nx,1\n"); }) == ErrorCode::FormatError);
}

TEST_CASE("separable data is fit perfectly by every model kind") {
  const auto ds = separable(2);
  for (auto kind : {ModelKind::RandomForest, ModelKind::Mlp, ModelKind::Tree}) {
    CAPTURE(to_string(kind));
    CHECK(accuracy(train(kind, ds, {}, 7), ds) == 1.0);
  }
}

TEST_CASE("XOR: forest and MLP succeed, a stump cannot") {
  const auto tr = xor_set(3), te = xor_set(4);
  const auto rf = train(ModelKind::RandomForest, tr, {}, 11);
  const auto mlp = train(ModelKind::Mlp, tr, {}, 11);
  TrainParams stump;
  stump.tree.max_depth = 1;
  const auto tree1 = train(ModelKind::Tree, tr, stump, 11);
  const auto full_tree = train(ModelKind::Tree, tr, {}, 11);
  CHECK(tree1.trees().front().depth() == 1);
  CHECK(accuracy(rf, te) > 0.95);
  CHECK(accuracy(mlp, te) > 0.95);
  CHECK(accuracy(tree1, te) <= 0.75);
  CHECK(accuracy(rf, te) >= accuracy(full_tree, te));
}

TEST_CASE("MLP training loss decreases every epoch on separable data") {
  const auto m = train(ModelKind::Mlp, separable(5), {}, 13);
  const auto& loss = m.loss_history();
  REQUIRE(loss.size() == 200);
  for (std::size_t e = 1; e < loss.size(); ++e) {
    CAPTURE(e);
    CHECK(loss[e] < loss[e - 1]);
  }
}

TEST_CASE("MLP analytic gradient matches central differences") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    auto net = MlpNet::init(5, 4, rng);
    for (auto& b : net.b1) b = standard_normal(rng) * 0.5;
    net.b2 = standard_normal(rng) * 0.5;
    std::vector<double> x(8 * 5);
    std::vector<int> y(8);
    for (auto& v : x) v = standard_normal(rng);
    for (auto& v : y) v = static_cast<int>(uniform_index(rng, 2));
    const auto g = mlp_gradient(net, x, y);
    auto p = net.parameters();
    const double h = 1e-5;
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto plus = net, minus = net;
      auto pp = p, pm = p;
      pp[k] += h;
      pm[k] -= h;
      plus.set_parameters(pp);
      minus.set_parameters(pm);
      const double num = (mlp_loss(plus, x, y) - mlp_loss(minus, x, y)) / (2 * h);
      const double rel = std::abs(num - g[k]) / std::max({std::abs(num), std::abs(g[k]), 1e-8});
      CAPTURE(k);
      CHECK(rel < 1e-4);
    }
  }
}

TEST_CASE("training is deterministic and models round-trip exactly") {
  const auto ds = xor_set(6);
  for (auto kind : {ModelKind::RandomForest, ModelKind::Mlp, ModelKind::Tree}) {
    CAPTURE(to_string(kind));
    const auto a = train(kind, ds, {}, 21), b = train(kind, ds, {}, 21);
    CHECK(a == b);
    const auto c = Model::from_json(a.to_json());
    CHECK(c.to_json() == a.to_json());
    for (std::size_t i = 0; i < ds.rows(); ++i) CHECK(c.predict_proba(ds.row(i)) == a.predict_proba(ds.row(i)));
  }
  CHECK(!(train(ModelKind::RandomForest, ds, {}, 1) == train(ModelKind::RandomForest, ds, {}, 2)));
}

TEST_CASE("forest scores are vote fractions") {
  const double row[] = {0.0};
  CHECK(Model::from_json(leaf_forest_json(100, 100)).predict_proba(row) == 1.0);
  CHECK(Model::from_json(leaf_forest_json(50, 100)).predict_proba(row) == 0.5);
  CHECK(Model::from_json(leaf_forest_json(0, 100)).predict_proba(row) == 0.0);
}

TEST_CASE("model errors") {
  Dataset one({"a"});
  const double r[] = {1};
  one.add(r, 1);
  one.add(r, 1);
  CHECK(code_of([&] { train(ModelKind::RandomForest, one, {}, 1); }) == ErrorCode::DegenerateTrainingSet);
  CHECK(code_of([&] { train(ModelKind::Mlp, Dataset({"a"}), {}, 1); }) == ErrorCode::DegenerateTrainingSet);
  const auto m = train(ModelKind::Tree, separable(1), {}, 1);
  const double wrong[] = {1, 2, 3};
  CHECK(code_of([&] { m.predict_proba(wrong); }) == ErrorCode::FeatureWidthMismatch);
  CHECK(code_of([] { Model::from_json("{}"); }) == ErrorCode::FormatError);
  CHECK(code_of([] { Model::from_json("not json"); }) == ErrorCode::FormatError);
  CHECK(code_of([] {
          Model::from_json(
              R"({"format":"trinket-model","version":1,"kind":"rf","seed":0,"feature_names":["a"],"trees":[[[0,0.5,0,0,1.0]]]})");
        }) == ErrorCode::FormatError);
}

TEST_CASE("evaluate counts and rates") {
  std::vector<Scored> s;
  for (int i = 0; i < 10; ++i) s.push_back({1.0, 1});
  for (int i = 0; i < 10; ++i) s.push_back({0.0, 0});
  auto r = evaluate(s);
  CHECK(r.far == 0);
  CHECK(r.frr == 0);
  CHECK(r.f_measure == 100);
  CHECK(r.eer == 0);

  Rng rng(2);
  std::vector<Scored> flat;
  for (int i = 0; i < 100; ++i) flat.push_back({0.7, static_cast<int>(uniform_index(rng, 2))});
  flat.push_back({0.7, 0});
  flat.push_back({0.7, 1});
  r = evaluate(flat, 0.5);
  CHECK(r.frr == 0);
  CHECK(r.far == 100);

  // 35 genuine / 1190 fraud with 1 false accept and 2 false rejects.
  std::vector<Scored> fold;
  for (int i = 0; i < 35; ++i) fold.push_back({i < 2 ? 0.1 : 0.9, 1});
  for (int i = 0; i < 1190; ++i) fold.push_back({i < 1 ? 0.9 : 0.1, 0});
  r = evaluate(fold, 0.5);
  CHECK(r.ta == 33);
  CHECK(r.fr == 2);
  CHECK(r.fa == 1);
  CHECK(r.tr == 1189);
  CHECK(r.far == doctest::Approx(100.0 / 1190));
  CHECK(r.frr == doctest::Approx(200.0 / 35));
  CHECK(r.far == doctest::Approx(0.084).epsilon(0.01));
  CHECK(r.frr == doctest::Approx(5.71).epsilon(0.001));
  CHECK(r.f_measure == doctest::Approx(100.0 * 2 * 33 / (2 * 33 + 1 + 2)));

  CHECK(code_of([] { evaluate(std::vector<Scored>{{1, 1}}); }) == ErrorCode::UndefinedMetric);
  CHECK(code_of([] { compute_eer(std::vector<Scored>{{1, 0}, {0, 0}}); }) == ErrorCode::UndefinedMetric);
  CHECK(code_of([] { compute_eer(std::vector<Scored>{}); }) == ErrorCode::UndefinedMetric);
}

TEST_CASE("FAR and FRR are monotone over a full threshold sweep") {
  Rng rng(9);
  std::vector<Scored> s;
  for (int i = 0; i < 500; ++i) s.push_back({uniform01(rng), static_cast<int>(uniform_index(rng, 2))});
  std::vector<double> ts;
  for (const auto& x : s) ts.push_back(x.score);
  std::sort(ts.begin(), ts.end(), std::greater<>());
  double far = -1, frr = 101;
  for (double t : ts) {  // threshold dropping
    const auto r = evaluate(s, t);
    CHECK(r.far >= far);
    CHECK(r.frr <= frr);
    far = r.far;
    frr = r.frr;
  }
}

TEST_CASE("EER examples") {
  std::vector<Scored> sep = {{0.9, 1}, {0.8, 1}, {0.2, 0}, {0.79, 0}};
  CHECK(compute_eer(sep).eer == 0.0);

  Rng rng(10);
  std::vector<Scored> same;
  for (int i = 0; i < 10000; ++i) same.push_back({uniform01(rng), i % 2});
  CHECK(std::abs(compute_eer(same).eer - 50.0) <= 3.0);

  std::vector<Scored> uni;
  for (int i = 0; i < 10000; ++i) {
    uni.push_back({uniform_real(rng, 0.4, 1.0), 1});
    uni.push_back({uniform_real(rng, 0.0, 0.6), 0});
  }
  const auto e = compute_eer(uni);
  CHECK(std::abs(e.eer - 100.0 / 6) <= 1.5);
  CHECK(e.threshold == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("EER agrees with a direct threshold sweep") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Scored> s;
    const int n = 2 + static_cast<int>(uniform_index(rng, 60));
    for (int i = 0; i < n; ++i)
      s.push_back({static_cast<double>(uniform_index(rng, 10)) / 10, i < 2 ? i : static_cast<int>(uniform_index(rng, 2))});
    CHECK(compute_eer(s).eer == doctest::Approx(eer_oracle(s)));
  }
}

TEST_CASE("AUC equals the pairwise win fraction") {
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Scored> s;
    for (int i = 0; i < 40; ++i)
      s.push_back({static_cast<double>(uniform_index(rng, 8)), i < 2 ? i : static_cast<int>(uniform_index(rng, 2))});
    double wins = 0, pairs = 0;
    for (const auto& g : s)
      for (const auto& f : s)
        if (g.label == 1 && f.label == 0) {
          pairs += 1;
          wins += g.score > f.score ? 1.0 : g.score == f.score ? 0.5 : 0.0;
        }
    CHECK(roc_auc(s) == doctest::Approx(wins / pairs));
  }
  CHECK(roc_auc(std::vector<Scored>{{1, 1}, {0, 0}}) == 1.0);
}
