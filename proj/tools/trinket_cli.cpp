// trinket: operator and evaluation command line.

#include <csignal>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "trinket/authsvc/http.hpp"
#include "trinket/authsvc/service.hpp"
#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/common/text.hpp"
#include "trinket/evalharness/attacks.hpp"
#include "trinket/evalharness/histogram.hpp"
#include "trinket/evalharness/synth.hpp"
#include "trinket/imgcore/image_io.hpp"

using namespace trinket;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Where the corpus comes from: a manifest on disk or an in-memory synthetic one.
struct CorpusOpts {
  std::string manifest;
  int synth = 0;
  std::uint64_t synth_seed = 1;

  void add_to(CLI::App* app) {
    app->add_option("--manifest", manifest, "corpus manifest CSV");
    app->add_option("--synth", synth, "generate N synthetic trinkets instead");
    app->add_option("--synth-seed", synth_seed, "synthetic corpus seed");
  }
};

struct Corpus {
  eval::TrinketCorpus corpus;
  std::unique_ptr<eval::ImageBank> bank;
  std::unique_ptr<eval::MatchCache> cache;
};

Corpus open_corpus(const CorpusOpts& o) {
  Corpus c;
  if (!o.manifest.empty()) {
    c.corpus = eval::read_manifest(o.manifest);
    c.bank = std::make_unique<eval::ImageBank>(c.corpus.root);
  } else {
    if (o.synth <= 0) throw Error(ErrorCode::BadRequest, "give --manifest or --synth");
    const auto synth = eval::synth_corpus({.n_trinkets = o.synth, .seed = o.synth_seed});
    c.corpus = synth.corpus;
    c.bank = std::make_unique<eval::ImageBank>();
    synth.add_to(*c.bank);
  }
  c.cache = std::make_unique<eval::MatchCache>(*c.bank);
  return c;
}

filt::FilterRuleConfig load_filters(const std::string& path) {
  return path.empty() ? filt::FilterRuleConfig{} : filt::FilterRuleConfig::load(path);
}

std::vector<eval::Ablation> parse_ablations(const std::vector<std::string>& names) {
  std::vector<eval::Ablation> out;
  for (const auto& n : names) out.push_back(eval::parse_ablation(n));
  return out;
}

json reasons_json(const std::vector<filt::Reason>& reasons) {
  json out = json::array();
  for (const auto& r : reasons) out.push_back({{"code", filt::code_name(r.code)}, {"message", r.message}});
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::string& path) { return read_file(path); }

auth::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trinket-based second-factor authentication toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* sub) { sub->add_option("-c,--config", config_path, "service config file"); };

  // serve
  auto* serve = app.add_subcommand("serve", "run the HTTP JSON API");
  add_config(serve);

  // enroll / auth / reset against the local store
  std::string user;
  std::vector<std::string> images;
  auto* enroll = app.add_subcommand("enroll", "enroll a user with 3 reference images");
  add_config(enroll);
  enroll->add_option("user", user)->required();
  enroll->add_option("images", images)->required()->expected(1, -1);
  auto* authc = app.add_subcommand("auth", "authenticate a user with one candidate image");
  add_config(authc);
  authc->add_option("user", user)->required();
  std::string candidate;
  authc->add_option("image", candidate)->required();
  auto* reset = app.add_subcommand("reset", "clear a user's enrollment");
  add_config(reset);
  reset->add_option("user", user)->required();

  // synth
  std::string out_dir;
  int synth_n = 60, distractors = 0;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  synth->add_option("out", out_dir)->required();
  synth->add_option("-n,--trinkets", synth_n, "trinket count (multiple of 10)");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--distractors", distractors, "attack dictionary images to write as well");

  // train
  CorpusOpts train_corpus;
  std::string model_out, kind_name = "rf";
  std::size_t feature_count = sim::kFeatureCount;
  std::uint64_t train_seed = 11, subset_seed = 7;
  int n_trees = 100;
  auto* train = app.add_subcommand("train", "train a scoring model on one protocol subset");
  train_corpus.add_to(train);
  train->add_option("-o,--out", model_out, "model JSON")->required();
  train->add_option("--kind", kind_name, "rf, mlp or tree");
  train->add_option("--features", feature_count, "leading feature columns (28 or 33)");
  train->add_option("--seed", train_seed);
  train->add_option("--subset-seed", subset_seed);
  train->add_option("--trees", n_trees);

  // eval
  CorpusOpts eval_corpus;
  std::string filters_path, log_path, report_path, log_ablation = "none";
  std::vector<std::string> ablations = {"none", "rb", "cb", "rb+cb"};
  int n_subsets = 10, n_folds = 10;
  bool ubounds = false;
  double threshold = 0.5;
  auto* evalc = app.add_subcommand("eval", "cross-validation with filter ablations");
  eval_corpus.add_to(evalc);
  evalc->add_option("--filters", filters_path, "filter rule config");
  evalc->add_option("--kind", kind_name);
  evalc->add_option("--features", feature_count);
  evalc->add_option("--subsets", n_subsets);
  evalc->add_option("--folds", n_folds);
  evalc->add_option("--seed", subset_seed);
  evalc->add_option("--ablations", ablations)->delimiter(',');
  evalc->add_flag("--ubounds", ubounds, "apply UBounds to filtered ablations");
  evalc->add_option("--threshold", threshold);
  evalc->add_option("--log", log_path, "decision log CSV");
  evalc->add_option("--log-ablation", log_ablation, "ablation written to --log");
  evalc->add_option("--report", report_path, "report CSV");

  // attack
  CorpusOpts attack_corpus;
  std::string attack_kind, dictionary, model_path;
  int min_master = 5;
  auto* attack = app.add_subcommand("attack", "run a dictionary attack against every corpus trinket");
  attack->add_option("kind", attack_kind, "pictionary, shoulder or master")->required();
  attack_corpus.add_to(attack);
  attack->add_option("--dictionary", dictionary, "CSV path,category")->required();
  attack->add_option("--model", model_path)->required();
  attack->add_option("--filters", filters_path);
  attack->add_option("--threshold", threshold);
  attack->add_option("--log", log_path, "attack log CSV");
  attack->add_option("--min-master", min_master, "distinct victims that make a master image");

  // hist
  CorpusOpts hist_corpus;
  std::string x_col, y_col, hist_out;
  int bins = 10;
  auto* hist = app.add_subcommand("hist", "rule-discovery histograms over a decision log");
  hist_corpus.add_to(hist);
  hist->add_option("--log", log_path, "decision log from eval")->required();
  hist->add_option("--seed", subset_seed, "subset seed used by eval");
  hist->add_option("--subsets", n_subsets);
  hist->add_option("--folds", n_folds);
  hist->add_option("-x", x_col)->required();
  hist->add_option("-y", y_col)->required();
  hist->add_option("--bins", bins);
  hist->add_option("-o,--out", hist_out, "histogram CSV (stdout when omitted)");
  auto* columns = app.add_subcommand("columns", "list histogram columns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      const auto cfg = auth::ServiceConfig::load(config_path);
      auto svc = auth::AuthService::open(cfg);
      auth::HttpServer server(*svc);
      const int port = server.bind(cfg.host, cfg.port);
      if (port < 0) throw Error(ErrorCode::IoError, "cannot bind " + cfg.host + ":" + std::to_string(cfg.port));
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << cfg.host << ":" << port << "\n";
      server.run();
      g_server = nullptr;
      return 0;
    }
    if (*enroll) {
      auto svc = auth::AuthService::open(auth::ServiceConfig::load(config_path));
      std::vector<std::vector<std::uint8_t>> bytes;
      for (const auto& p : images) bytes.push_back(read_bytes(p));
      const auto r = svc->enroll(user, bytes);
      std::cout << json{{"user", user}, {"enrolled", r.accepted}, {"feedback", reasons_json(r.feedback)}}.dump(2)
                << "\n";
      return r.accepted ? 0 : 2;
    }
    if (*authc) {
      auto svc = auth::AuthService::open(auth::ServiceConfig::load(config_path));
      const auto d = svc->authenticate(user, read_bytes(candidate));
      std::cout << json{{"user", user},
                        {"accepted", d.accepted},
                        {"score", d.score},
                        {"feedback", reasons_json(d.feedback)},
                        {"fallback_required", d.fallback_required}}
                       .dump(2)
                << "\n";
      return d.accepted ? 0 : 2;
    }
    if (*reset) {
      auto svc = auth::AuthService::open(auth::ServiceConfig::load(config_path));
      svc->reset(user);
      std::cout << "reset " << user << "\n";
      return 0;
    }
    if (*synth) {
      const auto s = eval::synth_corpus({.n_trinkets = synth_n, .seed = synth_seed});
      s.write(out_dir);
      std::cout << "wrote " << s.corpus.trinkets.size() << " trinkets and " << s.negatives.size()
                << " negatives to " << out_dir << "\n";
      if (distractors > 0) {
        std::vector<std::string> cats;
        const auto ds = eval::synth_distractors(distractors, synth_seed ^ 0xd15u, &cats);
        std::vector<eval::AttackImage> dict;
        for (std::size_t i = 0; i < ds.size(); ++i) {
          img::write_png(ds[i].image, fs::path(out_dir) / ds[i].id);
          dict.push_back({ds[i].id, cats[i]});
        }
        eval::write_dictionary(dict, fs::path(out_dir) / "dictionary.csv");
        std::cout << "wrote " << ds.size() << " dictionary images\n";
      }
      return 0;
    }
    if (*train) {
      auto c = open_corpus(train_corpus);
      const auto subsets = eval::generate_subsets(c.corpus, subset_seed, 1);
      std::vector<eval::AuthInstance> all;
      for (const auto& f : subsets[0].folds) all.insert(all.end(), f.instances.begin(), f.instances.end());
      const auto ds = eval::feature_dataset(all, *c.cache, feature_count);
      learn::TrainParams p;
      p.forest.n_trees = n_trees;
      const auto kind = learn::parse_model_kind(kind_name);
      const auto model = learn::train(kind, ds, p, train_seed);
      model.save(model_out);
      json manifest = {{"model", fs::path(model_out).filename().string()},
                       {"kind", learn::to_string(kind)},
                       {"seed", train_seed},
                       {"features", feature_count},
                       {"subset_seed", subset_seed},
                       {"instances", ds.rows()},
                       {"genuine", ds.count_label(1)},
                       {"fraud", ds.count_label(0)}};
      if (kind == learn::ModelKind::RandomForest) manifest["trees"] = n_trees;
      if (!train_corpus.manifest.empty()) {
        manifest["corpus"] = {{"manifest", train_corpus.manifest}};
      } else {
        manifest["corpus"] = {{"synthetic", true}, {"trinkets", train_corpus.synth}, {"seed", train_corpus.synth_seed}};
      }
      const auto manifest_path = fs::path(model_out).replace_extension(".training.json");
      write_text_atomic(manifest_path, manifest.dump(2) + "\n");
      std::cout << "trained " << learn::to_string(kind) << " on " << ds.rows() << " instances -> " << model_out
                << "\n";
      return 0;
    }
    if (*evalc) {
      auto c = open_corpus(eval_corpus);
      const auto subsets = eval::generate_subsets(c.corpus, subset_seed, n_subsets, n_folds);
      eval::CvConfig cfg;
      cfg.ablations = parse_ablations(ablations);
      cfg.ubounds = ubounds;
      cfg.feature_count = feature_count;
      cfg.filters = load_filters(filters_path);
      cfg.threshold = threshold;
      cfg.seed = subset_seed;
      const auto r =
          eval::run_cross_validation(subsets, *c.cache, eval::model_trainer(learn::parse_model_kind(kind_name)), cfg);
      std::cout << eval::format_report(r);
      if (!report_path.empty()) write_text_atomic(report_path, eval::report_csv(r));
      if (!log_path.empty()) eval::write_decision_log(r.at(eval::parse_ablation(log_ablation)).log, log_path);
      return 0;
    }
    if (*attack) {
      auto c = open_corpus(attack_corpus);
      const auto kind = eval::parse_attack_kind(attack_kind);
      const auto dict = eval::read_dictionary(dictionary);
      const auto targets = eval::corpus_targets(c.corpus);
      const auto model = learn::Model::load(model_path);
      eval::AttackConfig cfg;
      cfg.threshold = threshold;
      cfg.feature_count = model.width();
      cfg.filters = load_filters(filters_path);
      const auto run = eval::run_attack(targets, dict, kind, *c.cache,
                                        [&](std::span<const double> row) { return model.predict_proba(row); }, cfg);
      std::size_t broken = 0;
      double trials = 0;
      for (std::size_t i = 0; i < targets.size(); ++i) {
        broken += run.accepts_per_target[i] > 0;
        trials += static_cast<double>(run.trials_until_success[i]);
      }
      std::cout << eval::to_string(kind) << ": " << targets.size() << " targets x " << dict.size()
                << " images, FAR " << format_double(run.far) << "%, broken " << broken << ", mean trials "
                << format_double(targets.empty() ? 0 : trials / targets.size()) << "\n";
      for (const auto& m : eval::find_master_images(run.decisions, static_cast<std::size_t>(min_master)))
        std::cout << "master image " << m.image << " matches " << m.refsets << " reference sets\n";
      if (!log_path.empty()) eval::write_attack_log(run.decisions, log_path);
      return 0;
    }
    if (*hist) {
      auto c = open_corpus(hist_corpus);
      const auto subsets = eval::generate_subsets(c.corpus, subset_seed, n_subsets, n_folds);
      const auto log = eval::read_decision_log(log_path);
      const auto pts = eval::histogram_points(subsets, log, *c.cache, x_col, y_col);
      std::vector<double> xs, ys;
      for (const auto& p : pts) {
        xs.push_back(p.x);
        ys.push_back(p.y);
      }
      const auto cells = eval::rule_discovery_histograms(pts, eval::fit_axis(xs, bins), eval::fit_axis(ys, bins));
      const auto csv = eval::histogram_csv(cells, x_col, y_col);
      if (hist_out.empty()) std::cout << csv;
      else write_text_atomic(hist_out, csv);
      return 0;
    }
    if (*columns) {
      for (const auto& col : eval::analysis_columns()) std::cout << col << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
