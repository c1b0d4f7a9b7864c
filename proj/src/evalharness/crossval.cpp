#include "trinket/evalharness/crossval.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>
#include <sstream>

#include "trinket/common/error.hpp"
#include "trinket/common/file_io.hpp"
#include "trinket/common/parallel.hpp"
#include "trinket/common/text.hpp"

namespace trinket::eval {

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::None: return "none";
    case Ablation::Rb: return "rb";
    case Ablation::Cb: return "cb";
    case Ablation::Both: return "rb+cb";
  }
  return "?";
}

Ablation parse_ablation(std::string_view s) {
  for (auto a : kAllAblations)
    if (to_string(a) == s) return a;
  throw Error(ErrorCode::FormatError, "unknown ablation '" + std::string(s) + "'");
}

std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::Accept: return "accept";
    case Decision::Reject: return "reject";
    case Decision::Removed: return "removed";
  }
  return "?";
}

Decision parse_decision(std::string_view s) {
  for (auto d : {Decision::Accept, Decision::Reject, Decision::Removed})
    if (to_string(d) == s) return d;
  throw Error(ErrorCode::FormatError, "unknown decision '" + std::string(s) + "'");
}

namespace {

filt::FeedbackCode parse_code(std::string_view s) {
  for (auto c : filt::kAllFeedbackCodes)
    if (filt::code_name(c) == s) return c;
  throw Error(ErrorCode::FormatError, "unknown feedback code '" + std::string(s) + "'");
}

}  // namespace

std::string decision_log_csv(std::span<const DecisionRecord> log) {
  std::string out = "instance_id,subset,fold,label,score,decision,codes\n";
  for (const auto& r : log) {
    out += r.instance_id + ',' + std::to_string(r.subset) + ',' + std::to_string(r.fold) + ',' +
           std::to_string(r.label) + ',' + format_double(r.score) + ',' + std::string(to_string(r.decision)) + ',';
    for (std::size_t i = 0; i < r.codes.size(); ++i) {
      if (i) out += ';';
      out += filt::code_name(r.codes[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<DecisionRecord> parse_decision_log(std::string_view text) {
  std::vector<DecisionRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1) {
      if (trim(line) != "instance_id,subset,fold,label,score,decision,codes")
        throw Error(ErrorCode::FormatError, "decision log header mismatch");
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 7) throw Error(ErrorCode::FormatError, "decision log line " + std::to_string(lineno));
    DecisionRecord r;
    r.instance_id = f[0];
    r.subset = static_cast<int>(parse_int(f[1]));
    r.fold = static_cast<int>(parse_int(f[2]));
    r.label = static_cast<int>(parse_int(f[3]));
    r.score = parse_double(f[4]);
    r.decision = parse_decision(f[5]);
    if (!f[6].empty())
      for (const auto& c : split(f[6], ';')) r.codes.push_back(parse_code(c));
    out.push_back(std::move(r));
  }
  if (lineno == 0) throw Error(ErrorCode::FormatError, "empty decision log");
  return out;
}

void write_decision_log(std::span<const DecisionRecord> log, const std::filesystem::path& path) {
  write_text_atomic(path, decision_log_csv(log));
}

std::vector<DecisionRecord> read_decision_log(const std::filesystem::path& path) {
  return parse_decision_log(read_text(path));
}

namespace {

std::vector<learn::Scored> scored_of(std::span<const DecisionRecord> log) {
  std::vector<learn::Scored> s;
  for (const auto& r : log)
    if (r.decision != Decision::Removed) s.push_back({r.score, r.label});
  return s;
}

}  // namespace

learn::EvalReport recompute_report(std::span<const DecisionRecord> log, double threshold) {
  const auto s = scored_of(log);
  return learn::evaluate(s, threshold);
}

Trainer model_trainer(learn::ModelKind kind, learn::TrainParams params) {
  return [kind, params](const learn::Dataset& train, std::uint64_t seed) -> Scorer {
    auto model = std::make_shared<const learn::Model>(learn::train(kind, train, params, seed));
    return [model](std::span<const double> row) { return model->predict_proba(row); };
  };
}

sim::FeatureVector instance_features(const AuthInstance& inst, MatchCache& cache) {
  const auto refset = cache.refset(inst.refs);
  const auto matches = cache.against(inst.candidate, inst.refs);
  return sim::extract_features(*cache.bank().get(inst.candidate), *refset, matches);
}

namespace {

std::vector<std::string> head_names(std::size_t width) {
  if (width == 0 || width > sim::kFeatureCount)
    throw Error(ErrorCode::FeatureWidthMismatch, "feature width " + std::to_string(width));
  return {sim::kFeatureNames.begin(), sim::kFeatureNames.begin() + width};
}

}  // namespace

learn::Dataset feature_dataset(std::span<const AuthInstance> instances, MatchCache& cache, std::size_t width) {
  learn::Dataset ds(head_names(width));
  std::vector<sim::FeatureVector> rows(instances.size());
  parallel_for(instances.size(), [&](std::size_t i) { rows[i] = instance_features(instances[i], cache); });
  for (std::size_t i = 0; i < rows.size(); ++i) ds.add(std::span(rows[i]).first(width), instances[i].label);
  return ds;
}

const AblationResult& CvResult::at(Ablation a) const {
  for (const auto& r : runs)
    if (r.ablation == a) return r;
  throw Error(ErrorCode::ShapeError, "ablation " + std::string(to_string(a)) + " was not run");
}

namespace {

// A CBFilter trained per fold, or a constant verdict when the fold's reference
// sets held only one class.
struct FoldCbFilter {
  std::optional<filt::CbFilter> model;
  bool reject_all = false;

  filt::FilterVerdict verdict(const sim::ReferenceSet& rs) const {
    if (model) return model->verdict(rs);
    filt::FilterVerdict v;
    if (reject_all) v.reject(filt::RuleId::CbFilter, filt::FeedbackCode::LowQualityOrPlain);
    return v;
  }
};

}  // namespace

CvResult run_cross_validation(const std::vector<Subset>& subsets, MatchCache& cache, const Trainer& trainer,
                              const CvConfig& cfg) {
  cfg.filters.validate();
  const auto names = head_names(cfg.feature_count);

  // scores[s][f][i] from the fold's model, shared by every ablation.
  std::vector<std::vector<std::vector<double>>> scores(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const auto& sub = subsets[s];
    std::vector<learn::Dataset> fold_rows;
    for (const auto& f : sub.folds) fold_rows.push_back(feature_dataset(f.instances, cache, cfg.feature_count));
    for (std::size_t f = 0; f < sub.folds.size(); ++f) {
      learn::Dataset train(names);
      for (std::size_t g = 0; g < sub.folds.size(); ++g)
        if (g != f) train.append(fold_rows[g]);
      const auto scorer = trainer(train, mix_seed(cfg.seed, s * sub.folds.size() + f));
      auto& out = scores[s].emplace_back();
      for (std::size_t i = 0; i < fold_rows[f].rows(); ++i) out.push_back(scorer(fold_rows[f].row(i)));
    }
  }

  // Reference sets from the unfiltered run: class 1 when any instance using
  // them was misclassified. Keyed per subset and fold.
  CvResult result;
  const bool need_cb = std::any_of(cfg.ablations.begin(), cfg.ablations.end(),
                                   [](Ablation a) { return a == Ablation::Cb || a == Ablation::Both; });
  std::vector<std::vector<std::map<std::array<std::string, 3>, int>>> rsb(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (std::size_t f = 0; f < subsets[s].folds.size(); ++f) {
      auto& m = rsb[s].emplace_back();
      const auto& inst = subsets[s].folds[f].instances;
      for (std::size_t i = 0; i < inst.size(); ++i) {
        const bool accept = scores[s][f][i] >= cfg.threshold;
        const bool wrong = accept != (inst[i].label == learn::kGenuine);
        auto& label = m[inst[i].refs];
        label = std::max(label, wrong ? 1 : 0);
      }
      for (const auto& [refs, label] : m) {
        ++result.rsb_sets;
        result.rsb_rejects += label;
      }
    }
  }
  std::vector<std::vector<FoldCbFilter>> cbf(subsets.size());
  if (need_cb) {
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      for (std::size_t f = 0; f < subsets[s].folds.size(); ++f) {
        auto ds = filt::cbfilter_dataset();
        for (std::size_t g = 0; g < subsets[s].folds.size(); ++g) {
          if (g == f) continue;
          for (const auto& [refs, label] : rsb[s][g]) ds.add(filt::cbfilter_features(*cache.refset(refs)), label);
        }
        FoldCbFilter fc;
        if (ds.count_label(0) == 0 || ds.count_label(1) == 0) {
          fc.reject_all = ds.count_label(0) == 0;
          ++result.constant_cbfilters;
        } else {
          fc.model = filt::CbFilter::train(ds, mix_seed(cfg.seed ^ 0xcbf, s * 100 + f), cfg.cbfilter);
        }
        cbf[s].push_back(std::move(fc));
      }
    }
  }

  for (auto ablation : cfg.ablations) {
    AblationResult run;
    run.ablation = ablation;
    const bool rb = ablation == Ablation::Rb || ablation == Ablation::Both;
    const bool cb = ablation == Ablation::Cb || ablation == Ablation::Both;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      for (std::size_t f = 0; f < subsets[s].folds.size(); ++f) {
        const auto& inst = subsets[s].folds[f].instances;
        for (std::size_t i = 0; i < inst.size(); ++i) {
          DecisionRecord rec{inst[i].id, inst[i].subset, inst[i].fold, inst[i].label, scores[s][f][i],
                             Decision::Reject, {}};
          filt::FilterVerdict ref_v, cand_v;
          if (rb || cb) {
            const auto refset = cache.refset(inst[i].refs);
            if (rb) ref_v.merge(filt::rbfilter_reference(*refset, cfg.filters));
            if (cb) ref_v.merge(cbf[s][f].verdict(*refset));
          }
          if (ablation != Ablation::None) {
            const auto& stats = cache.bank().get(inst[i].candidate)->stats;
            if (rb) cand_v.merge(filt::rbfilter_candidate(stats, cfg.filters));
            if (cfg.ubounds) cand_v.merge(filt::ubounds_candidate(stats, cfg.filters));
          }
          if (!ref_v.accepted()) {
            rec.decision = Decision::Removed;
            rec.codes = ref_v.codes();
            ++run.removed;
          } else if (!cand_v.accepted()) {
            rec.score = -1;
            rec.decision = Decision::Reject;
            rec.codes = cand_v.codes();
          } else {
            rec.decision = rec.score >= cfg.threshold ? Decision::Accept : Decision::Reject;
          }
          run.log.push_back(std::move(rec));
        }
      }
    }
    const auto scored = scored_of(run.log);
    const bool both = std::any_of(scored.begin(), scored.end(), [](auto& x) { return x.label == learn::kGenuine; }) &&
                      std::any_of(scored.begin(), scored.end(), [](auto& x) { return x.label == learn::kFraud; });
    if (both) {
      run.report = learn::evaluate(scored, cfg.threshold);
      run.auc = learn::roc_auc(scored);
    } else {
      run.rates_defined = false;
    }
    result.runs.push_back(std::move(run));
  }
  return result;
}

std::string format_report(const CvResult& r) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-8s %8s %8s %10s %8s %8s %8s %8s %8s %8s %8s\n", "filters", "FAR%", "FRR%",
                "F-measure", "EER%", "AUC", "TA", "TR", "FA", "FR", "removed");
  out << buf;
  for (const auto& run : r.runs) {
    const auto& e = run.report;
    if (!run.rates_defined) {
      std::snprintf(buf, sizeof buf, "%-8s %8s %8s %10s %8s %8s %8s %8s %8s %8s %8zu\n",
                    std::string(to_string(run.ablation)).c_str(), "-", "-", "-", "-", "-", "-", "-", "-", "-",
                    run.removed);
      out << buf;
      continue;
    }
    std::snprintf(buf, sizeof buf, "%-8s %8.3f %8.3f %10.4f %8.3f %8.4f %8lld %8lld %8lld %8lld %8zu\n",
                  std::string(to_string(run.ablation)).c_str(), e.far, e.frr, e.f_measure, e.eer, run.auc, e.ta,
                  e.tr, e.fa, e.fr, run.removed);
    out << buf;
  }
  out << "CBFilter training sets: " << r.rsb_sets << " labelled reference sets, " << r.rsb_rejects
      << " in the reject class";
  if (r.constant_cbfilters) out << ", " << r.constant_cbfilters << " single-class folds";
  out << '\n';
  return out.str();
}

std::string report_csv(const CvResult& r) {
  std::string out = "filters,far,frr,f_measure,eer,threshold_at_eer,auc,ta,tr,fa,fr,removed\n";
  for (const auto& run : r.runs) {
    const auto& e = run.report;
    out += std::string(to_string(run.ablation)) + ',' + format_double(e.far) + ',' + format_double(e.frr) + ',' +
           format_double(e.f_measure) + ',' + format_double(e.eer) + ',' + format_double(e.threshold_at_eer) + ',' +
           format_double(run.auc) + ',' + std::to_string(e.ta) + ',' + std::to_string(e.tr) + ',' +
           std::to_string(e.fa) + ',' + std::to_string(e.fr) + ',' + std::to_string(run.removed) + '\n';
  }
  return out;
}

}  // namespace trinket::eval
