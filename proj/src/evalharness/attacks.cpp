#include "trinket/evalharness/attacks.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/common/parallel.hpp"
#include "trinket/common/text.hpp"

namespace trinket::eval {

std::vector<AttackTarget> corpus_targets(const TrinketCorpus& corpus) {
  std::vector<AttackTarget> out;
  for (const auto& e : corpus.trinkets) out.push_back({e.id, {e.images[1], e.images[2], e.images[3]}, e.category});
  return out;
}

std::vector<AttackImage> read_dictionary(const std::filesystem::path& path) {
  const auto dir = std::filesystem::absolute(path).parent_path();
  std::istringstream in(read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<AttackImage> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != 2 || cols[0].empty())
      throw Error(ErrorCode::FormatError, path.string() + ":" + std::to_string(line_no) + ": expected path,category");
    out.push_back({(dir / cols[0]).lexically_normal().string(), cols[1]});
  }
  return out;
}

void write_dictionary(std::span<const AttackImage> images, const std::filesystem::path& path) {
  std::string out = "path,category\n";
  for (const auto& im : images) out += im.id + ',' + im.category + '\n';
  write_text_atomic(path, out);
}

std::string_view to_string(AttackKind k) {
  switch (k) {
    case AttackKind::Pictionary: return "pictionary";
    case AttackKind::ShoulderSurf: return "shoulder";
    case AttackKind::MasterProbe: return "master";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
  for (auto k : {AttackKind::Pictionary, AttackKind::ShoulderSurf, AttackKind::MasterProbe})
    if (to_string(k) == s) return k;
  throw Error(ErrorCode::FormatError, "unknown attack kind '" + std::string(s) + "'");
}

std::size_t attack_instance_count(std::size_t targets, std::size_t images) { return targets * images; }

std::vector<std::size_t> trial_order(const AttackTarget& target, std::span<const AttackImage> images,
                                     AttackKind kind) {
  std::vector<std::size_t> order(images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (kind != AttackKind::ShoulderSurf) return order;
  if (target.category.empty())
    throw Error(ErrorCode::MissingCategories, "target " + target.id + " has no category");
  for (const auto& im : images)
    if (im.category.empty()) throw Error(ErrorCode::MissingCategories, "attack image " + im.id + " has no category");
  std::stable_partition(order.begin(), order.end(),
                        [&](std::size_t i) { return images[i].category == target.category; });
  return order;
}

namespace {

AuthInstance attack_instance(const AttackTarget& t, const AttackImage& im) {
  AuthInstance inst;
  inst.id = t.id + ">" + im.id;
  inst.candidate = im.id;
  inst.refs = t.refs;
  inst.label = learn::kFraud;
  return inst;
}

}  // namespace

void for_each_attack_instance(std::span<const AttackTarget> targets, std::span<const AttackImage> images,
                              AttackKind kind, const std::function<void(const AuthInstance&)>& fn) {
  for (const auto& t : targets)
    for (auto i : trial_order(t, images, kind)) fn(attack_instance(t, images[i]));
}

AttackRun run_attack(std::span<const AttackTarget> targets, std::span<const AttackImage> images, AttackKind kind,
                     MatchCache& cache, const Scorer& scorer, const AttackConfig& cfg) {
  AttackRun run;
  run.kind = kind;
  run.corpus_size = images.size();
  std::vector<std::vector<std::size_t>> orders;
  for (const auto& t : targets) orders.push_back(trial_order(t, images, kind));

  run.decisions.resize(attack_instance_count(targets.size(), images.size()));
  parallel_for(run.decisions.size(), [&](std::size_t k) {
    const std::size_t ti = k / images.size();
    const auto& im = images[orders[ti][k % images.size()]];
    const auto inst = attack_instance(targets[ti], im);
    auto& d = run.decisions[k];
    d.target = targets[ti].id;
    d.image = im.id;
    if (cfg.candidate_filters) {
      const auto& stats = cache.bank().get(im.id)->stats;
      auto v = filt::rbfilter_candidate(stats, cfg.filters);
      v.merge(filt::ubounds_candidate(stats, cfg.filters));
      if (!v.accepted()) {
        d.score = -1;
        return;
      }
    }
    const auto f = instance_features(inst, cache);
    d.score = scorer(std::span(f).first(cfg.feature_count));
    d.accepted = d.score >= cfg.threshold;
  });

  std::size_t accepts = 0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    std::size_t first = run.corpus_size, n = 0;
    for (std::size_t j = 0; j < images.size(); ++j) {
      if (!run.decisions[ti * images.size() + j].accepted) continue;
      if (n++ == 0) first = j + 1;
    }
    run.trials_until_success.push_back(first);
    run.accepts_per_target.push_back(n);
    accepts += n;
  }
  if (!run.decisions.empty()) run.far = 100.0 * static_cast<double>(accepts) / run.decisions.size();
  return run;
}

std::string attack_log_csv(std::span<const AttackDecision> log) {
  std::string out = "target,image,score,decision\n";
  for (const auto& d : log)
    out += d.target + ',' + d.image + ',' + format_double(d.score) + ',' + (d.accepted ? "accept" : "reject") + '\n';
  return out;
}

std::vector<AttackDecision> parse_attack_log(std::string_view text) {
  std::vector<AttackDecision> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1) {
      if (trim(line) != "target,image,score,decision") throw Error(ErrorCode::FormatError, "attack log header mismatch");
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 4 || (f[3] != "accept" && f[3] != "reject"))
      throw Error(ErrorCode::FormatError, "attack log line " + std::to_string(lineno));
    out.push_back({f[0], f[1], parse_double(f[2]), f[3] == "accept"});
  }
  if (lineno == 0) throw Error(ErrorCode::FormatError, "empty attack log");
  return out;
}

void write_attack_log(std::span<const AttackDecision> log, const std::filesystem::path& path) {
  write_text_atomic(path, attack_log_csv(log));
}

std::vector<AttackDecision> read_attack_log(const std::filesystem::path& path) {
  return parse_attack_log(read_text(path));
}

std::vector<MasterImage> find_master_images(std::span<const AttackDecision> decisions, std::size_t min_matches) {
  std::map<std::string, std::set<std::string>> hits;
  for (const auto& d : decisions)
    if (d.accepted) hits[d.image].insert(d.target);
  std::vector<MasterImage> out;
  for (const auto& [image, targets] : hits)
    if (targets.size() >= min_matches) out.push_back({image, targets.size()});
  std::stable_sort(out.begin(), out.end(), [](const MasterImage& a, const MasterImage& b) { return a.refsets > b.refsets; });
  return out;
}

}  // namespace trinket::eval
