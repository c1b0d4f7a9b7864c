#include "trinket/learn/model.hpp"

#include <cmath>

#include "json.hpp"

#include "trinket/common/error.hpp"
#include "trinket/common/parallel.hpp"
#include "trinket/common/file_io.hpp"

namespace trinket::learn {

using nlohmann::json;

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::RandomForest: return "rf";
    case ModelKind::Mlp: return "mlp";
    case ModelKind::Tree: return "tree";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view s) {
  if (s == "rf") return ModelKind::RandomForest;
  if (s == "mlp") return ModelKind::Mlp;
  if (s == "tree") return ModelKind::Tree;
  throw Error(ErrorCode::FormatError, "unknown model kind '" + std::string(s) + "'");
}

namespace {

constexpr int kFormatVersion = 1;

// Adam step sizes; the learning rate comes from MlpParams.
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

std::vector<std::size_t> all_rows(const Dataset& ds) {
  std::vector<std::size_t> idx(ds.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return idx;
}

}  // namespace

Model train(ModelKind kind, const Dataset& ds, const TrainParams& params, std::uint64_t seed) {
  if (ds.count_label(kGenuine) == 0 || ds.count_label(kFraud) == 0)
    throw Error(ErrorCode::DegenerateTrainingSet, "training data must contain both classes");

  Model m;
  m.kind_ = kind;
  m.seed_ = seed;
  m.feature_names_ = ds.feature_names();
  const std::size_t n = ds.rows(), width = ds.width();

  if (kind == ModelKind::Tree) {
    Rng rng(seed);
    const auto idx = all_rows(ds);
    m.trees_.push_back(DecisionTree::fit(ds, idx, params.tree, rng));
    return m;
  }

  if (kind == ModelKind::RandomForest) {
    TreeParams tp = params.forest.tree;
    if (tp.max_features == 0) tp.max_features = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(width))));
    m.trees_.resize(params.forest.n_trees);
    parallel_for(m.trees_.size(), [&](std::size_t t) {
      Rng rng(mix_seed(seed, t));
      std::vector<std::size_t> sample(n);
      for (auto& s : sample) s = uniform_index(rng, n);
      m.trees_[t] = DecisionTree::fit(ds, sample, tp, rng);
    });
    return m;
  }

  // MLP on standardized features.
  m.mean_.assign(width, 0.0);
  m.sd_.assign(width, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < width; ++c) m.mean_[c] += ds.row(r)[c] / static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      const double d = ds.row(r)[c] - m.mean_[c];
      m.sd_[c] += d * d / static_cast<double>(n);
    }
  for (auto& s : m.sd_) s = s > 0 ? std::sqrt(s) : 1.0;

  std::vector<double> x(n * width);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < width; ++c) x[r * width + c] = (ds.row(r)[c] - m.mean_[c]) / m.sd_[c];

  Rng rng(seed);
  const auto& mp = params.mlp;
  m.mlp_ = MlpNet::init(static_cast<int>(width), mp.hidden, rng);
  auto theta = m.mlp_.parameters();
  std::vector<double> m1(theta.size(), 0.0), m2(theta.size(), 0.0);
  long long step = 0;

  auto order = all_rows(ds);
  const std::size_t batch = static_cast<std::size_t>(std::max(1, mp.batch_size));
  std::vector<double> bx;
  std::vector<int> by;
  for (int epoch = 0; epoch < mp.epochs; ++epoch) {
    shuffle(std::span(order), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.insert(bx.end(), x.begin() + order[i] * width, x.begin() + (order[i] + 1) * width);
        by.push_back(ds.label(order[i]));
      }
      const auto g = mlp_gradient(m.mlp_, bx, by);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t k = 0; k < theta.size(); ++k) {
        m1[k] = kBeta1 * m1[k] + (1 - kBeta1) * g[k];
        m2[k] = kBeta2 * m2[k] + (1 - kBeta2) * g[k] * g[k];
        theta[k] -= mp.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + kAdamEps);
      }
      m.mlp_.set_parameters(theta);
    }
    m.loss_history_.push_back(mlp_loss(m.mlp_, x, ds.labels()));
  }
  return m;
}

double Model::predict_proba(std::span<const double> row) const {
  if (row.size() != width())
    throw Error(ErrorCode::FeatureWidthMismatch,
                "model expects " + std::to_string(width()) + " features, got " + std::to_string(row.size()));
  switch (kind_) {
    case ModelKind::Tree: return trees_.front().predict(row);
    case ModelKind::RandomForest: {
      std::size_t votes = 0;
      for (const auto& t : trees_) votes += t.predict(row) > 0.5;
      return static_cast<double>(votes) / static_cast<double>(trees_.size());
    }
    case ModelKind::Mlp: {
      std::vector<double> z(row.size());
      for (std::size_t c = 0; c < row.size(); ++c) z[c] = (row[c] - mean_[c]) / sd_[c];
      return mlp_.forward(z);
    }
  }
  return 0.0;
}

std::string Model::to_json() const {
  json j;
  j["format"] = "trinket-model";
  j["version"] = kFormatVersion;
  j["kind"] = to_string(kind_);
  j["seed"] = seed_;
  j["feature_names"] = feature_names_;
  if (kind_ == ModelKind::Mlp) {
    j["mlp"] = {{"inputs", mlp_.inputs}, {"hidden", mlp_.hidden}, {"w1", mlp_.w1}, {"b1", mlp_.b1},
                {"w2", mlp_.w2},         {"b2", mlp_.b2},         {"mean", mean_}, {"sd", sd_}};
  } else {
    json trees = json::array();
    for (const auto& t : trees_) {
      json nodes = json::array();
      for (const auto& nd : t.nodes()) nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right, nd.value});
      trees.push_back(std::move(nodes));
    }
    j["trees"] = std::move(trees);
  }
  return j.dump();
}

Model Model::from_json(std::string_view text) {
  Model m;
  try {
    const json j = json::parse(text);
    if (j.at("format") != "trinket-model") throw Error(ErrorCode::FormatError, "not a model file");
    if (j.at("version").get<int>() != kFormatVersion) throw Error(ErrorCode::FormatError, "unsupported model version");
    m.kind_ = parse_model_kind(j.at("kind").get<std::string>());
    m.seed_ = j.at("seed").get<std::uint64_t>();
    m.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
    if (m.kind_ == ModelKind::Mlp) {
      const auto& p = j.at("mlp");
      m.mlp_.inputs = p.at("inputs").get<int>();
      m.mlp_.hidden = p.at("hidden").get<int>();
      m.mlp_.w1 = p.at("w1").get<std::vector<double>>();
      m.mlp_.b1 = p.at("b1").get<std::vector<double>>();
      m.mlp_.w2 = p.at("w2").get<std::vector<double>>();
      m.mlp_.b2 = p.at("b2").get<double>();
      m.mean_ = p.at("mean").get<std::vector<double>>();
      m.sd_ = p.at("sd").get<std::vector<double>>();
      const auto in = static_cast<std::size_t>(m.mlp_.inputs), hid = static_cast<std::size_t>(m.mlp_.hidden);
      if (in != m.width() || m.mlp_.w1.size() != in * hid || m.mlp_.b1.size() != hid || m.mlp_.w2.size() != hid ||
          m.mean_.size() != in || m.sd_.size() != in)
        throw Error(ErrorCode::FormatError, "inconsistent MLP dimensions");
    } else {
      for (const auto& t : j.at("trees")) {
        std::vector<TreeNode> nodes;
        for (const auto& nd : t) {
          TreeNode n{nd.at(0).get<int>(), nd.at(1).get<double>(), nd.at(2).get<int>(), nd.at(3).get<int>(),
                     nd.at(4).get<double>()};
          nodes.push_back(n);
        }
        const int count = static_cast<int>(nodes.size());
        for (int i = 0; i < count; ++i) {
          const auto& n = nodes[i];
          if (n.feature >= static_cast<int>(m.width()) ||
              (n.feature >= 0 && (n.left <= i || n.right <= i || n.left >= count || n.right >= count)))
            throw Error(ErrorCode::FormatError, "malformed tree node");
        }
        if (nodes.empty()) throw Error(ErrorCode::FormatError, "empty tree");
        m.trees_.emplace_back(std::move(nodes));
      }
      if (m.trees_.empty()) throw Error(ErrorCode::FormatError, "model has no trees");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("model file: ") + e.what());
  }
  return m;
}

void Model::save(const std::filesystem::path& path) const {
  write_text_atomic(path, to_json());
}

Model Model::load(const std::filesystem::path& path) {
  return from_json(read_text(path));
}

}  // namespace trinket::learn
