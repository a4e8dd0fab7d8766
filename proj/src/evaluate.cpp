#include "actiboost/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "actiboost/errors.hpp"

namespace actiboost {

namespace {

// Deterministic seed derivation, platform independent.
std::uint32_t mix_seed(std::uint32_t base, std::uint64_t a, std::uint64_t b = 0,
                       std::uint64_t c = 0) {
  std::uint64_t h = base;
  for (std::uint64_t v : {a, b, c}) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
  }
  return static_cast<std::uint32_t>(h ^ (h >> 32));
}

std::vector<int> sorted_subjects(const std::vector<FeatureInstance>& instances) {
  std::set<int> ids;
  for (const FeatureInstance& inst : instances) ids.insert(inst.subject_id);
  return {ids.begin(), ids.end()};
}

std::vector<std::string> global_class_names(const std::vector<FeatureInstance>& instances) {
  std::set<Activity> classes;
  for (const FeatureInstance& inst : instances) classes.insert(inst.label);
  std::vector<std::string> names;
  for (Activity a : classes) names.push_back(to_string(a));
  return names;
}

std::vector<FeatureInstance> gather(const std::vector<FeatureInstance>& instances,
                                    const std::vector<long>& idx) {
  std::vector<FeatureInstance> out;
  out.reserve(idx.size());
  for (long i : idx) out.push_back(instances[i]);
  return out;
}

// Scores idx under the model and appends one ScoredPrediction per instance.
void append_predictions(const GbmModel& model, const std::vector<FeatureInstance>& instances,
                        const std::vector<long>& idx, Exec exec,
                        std::vector<ScoredPrediction>& out) {
  const std::vector<FeatureInstance> rows = gather(instances, idx);
  const std::vector<double> probs = batch_probabilities(model, rows, exec);
  const int l = model.n_classes;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    ScoredPrediction sp;
    sp.instance_id = idx[k];
    sp.truth = model.class_index(rows[k].label);
    sp.proba.assign(probs.begin() + k * l, probs.begin() + (k + 1) * l);
    sp.predicted = argmax_index(sp.proba);
    out.push_back(std::move(sp));
  }
}

double sample_std(const std::vector<double>& values, double mean) {
  if (values.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

// Mean of per-repetition summaries; ROC traces and supports come from
// repetition 0 (supports are identical across repetitions by construction).
TunedEval average_summaries(const std::vector<EvalSummary>& reps) {
  TunedEval out;
  out.mean = reps[0];
  const double inv = 1.0 / static_cast<double>(reps.size());
  if (reps.size() > 1) {
    out.mean.accuracy = 0.0;
    out.mean.macro_f1 = 0.0;
    for (ClassMetrics& cm : out.mean.per_class) {
      cm.accuracy = 0.0;
      cm.precision = 0.0;
      cm.f1 = 0.0;
      cm.auc = 0.0;
    }
    for (const EvalSummary& rep : reps) {
      out.mean.accuracy += rep.accuracy;
      out.mean.macro_f1 += rep.macro_f1;
      for (std::size_t c = 0; c < out.mean.per_class.size(); ++c) {
        out.mean.per_class[c].accuracy += rep.per_class[c].accuracy;
        out.mean.per_class[c].precision += rep.per_class[c].precision;
        out.mean.per_class[c].f1 += rep.per_class[c].f1;
        out.mean.per_class[c].auc += rep.per_class[c].auc;
      }
    }
    out.mean.accuracy *= inv;
    out.mean.macro_f1 *= inv;
    for (ClassMetrics& cm : out.mean.per_class) {
      cm.accuracy *= inv;
      cm.precision *= inv;
      cm.f1 *= inv;
      cm.auc *= inv;
    }
  }
  std::vector<double> f1s;
  f1s.reserve(reps.size());
  for (const EvalSummary& rep : reps) f1s.push_back(rep.macro_f1);
  out.macro_f1_std = sample_std(f1s, out.mean.macro_f1);
  return out;
}

}  // namespace

std::vector<CvFold> make_loso_folds(const std::vector<FeatureInstance>& instances) {
  if (instances.empty()) throw std::invalid_argument("no instances to fold");
  const std::vector<int> subjects = sorted_subjects(instances);
  if (subjects.size() < 2) {
    throw data_error("one-user-out CV needs at least two subjects, got " +
                     std::to_string(subjects.size()));
  }
  std::vector<CvFold> folds;
  folds.reserve(subjects.size());
  for (int s : subjects) {
    CvFold fold;
    fold.held_out_subject = s;
    for (long i = 0; i < static_cast<long>(instances.size()); ++i) {
      (instances[i].subject_id == s ? fold.test_idx : fold.train_idx).push_back(i);
    }
    folds.push_back(std::move(fold));
  }
  return folds;
}

FoldModelMap train_fold_models(const std::vector<FeatureInstance>& instances,
                               const TrainConfig& config, Exec exec) {
  const std::vector<CvFold> folds = make_loso_folds(instances);
  const std::vector<std::string> classes = global_class_names(instances);

  const std::ptrdiff_t n_folds = static_cast<std::ptrdiff_t>(folds.size());
  std::vector<GbmModel> slots(folds.size());
  std::vector<std::exception_ptr> errors(folds.size());

  auto run_fold = [&](std::ptrdiff_t k) {
    const CvFold& fold = folds[k];
    try {
      const std::vector<FeatureInstance> train_set = gather(instances, fold.train_idx);
      std::set<std::string> seen;
      for (const FeatureInstance& inst : train_set) seen.insert(to_string(inst.label));
      for (const std::string& name : classes) {
        if (!seen.count(name)) {
          throw data_error("fold holding out subject " +
                           std::to_string(fold.held_out_subject) +
                           " has no training instances of class " + name);
        }
      }
      TrainConfig fold_config = config;
      fold_config.seed = mix_seed(config.seed, static_cast<std::uint64_t>(fold.held_out_subject));
      slots[k] = train(train_set, fold_config, nullptr, exec);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < n_folds; ++k) run_fold(k);
  } else {
    for (std::ptrdiff_t k = 0; k < n_folds; ++k) run_fold(k);
  }
  for (std::ptrdiff_t k = 0; k < n_folds; ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
  }

  FoldModelMap models;
  for (std::ptrdiff_t k = 0; k < n_folds; ++k) {
    models.emplace(folds[k].held_out_subject, std::move(slots[k]));
  }
  return models;
}

BaselineCv run_baseline_cv(const std::vector<FeatureInstance>& instances,
                           const TrainConfig& train_config, Exec exec,
                           const FoldModelMap* fold_models) {
  const std::vector<CvFold> folds = make_loso_folds(instances);
  FoldModelMap local;
  if (!fold_models) {
    local = train_fold_models(instances, train_config, exec);
    fold_models = &local;
  }

  BaselineCv cv;
  const int l = fold_models->begin()->second.n_classes;
  std::vector<ScoredPrediction> pooled;
  for (const CvFold& fold : folds) {
    const GbmModel& model = fold_models->at(fold.held_out_subject);
    std::vector<ScoredPrediction> preds;
    append_predictions(model, instances, fold.test_idx, exec, preds);
    pooled.insert(pooled.end(), preds.begin(), preds.end());
    cv.by_subject.emplace(fold.held_out_subject, compute_metrics(std::move(preds), l, true));
  }
  cv.pooled = compute_metrics(std::move(pooled), l, true);
  return cv;
}

TunedCv run_tuned_cv(const std::vector<FeatureInstance>& instances,
                     const TrainConfig& train_config, const CalibrationConfig& calib_config,
                     int repetitions, Exec exec, const FoldModelMap* fold_models) {
  if (repetitions < 1) throw config_error("repetitions must be at least 1");
  const std::vector<CvFold> folds = make_loso_folds(instances);
  FoldModelMap local;
  if (!fold_models) {
    local = train_fold_models(instances, train_config, exec);
    fold_models = &local;
  }
  const int l = fold_models->begin()->second.n_classes;

  TunedCv cv;
  cv.repetitions = repetitions;
  // pooled_preds[r] collects every kept subject's predictions for repetition r.
  std::vector<std::vector<ScoredPrediction>> pooled_preds(repetitions);

  for (const CvFold& fold : folds) {
    const int subject = fold.held_out_subject;
    const GbmModel& base = fold_models->at(subject);

    // Stratified halves: per class, shuffle the subject's rows and put the
    // first floor(n_c / 2) into set A. Both halves need every class the
    // subject has, so singletons force a skip.
    std::vector<std::vector<long>> by_class(l);
    for (long i : fold.test_idx) {
      by_class[base.class_index(instances[i].label)].push_back(i);
    }
    bool splittable = true;
    for (const std::vector<long>& group : by_class) {
      if (group.size() == 1) splittable = false;
    }
    if (!splittable || fold.test_idx.size() < 4) {
      std::cerr << "warning: subject " << subject
                << " has too few instances to halve per class; skipping tuned CV\n";
      cv.skipped_subjects.push_back(subject);
      continue;
    }

    std::vector<EvalSummary> rep_summaries;
    rep_summaries.reserve(repetitions);
    bool tuned_ok = true;
    for (int r = 0; r < repetitions && tuned_ok; ++r) {
      std::mt19937 rng(mix_seed(calib_config.seed, static_cast<std::uint64_t>(subject),
                                static_cast<std::uint64_t>(r), 0x51u));
      std::vector<long> set_a, set_b;
      for (std::vector<long> group : by_class) {
        std::shuffle(group.begin(), group.end(), rng);
        const std::size_t half = group.size() / 2;
        for (std::size_t k = 0; k < group.size(); ++k) {
          (k < half ? set_a : set_b).push_back(group[k]);
        }
      }

      std::vector<ScoredPrediction> preds;
      try {
        for (int side = 0; side < 2; ++side) {
          const std::vector<long>& tune_idx = side == 0 ? set_a : set_b;
          const std::vector<long>& eval_idx = side == 0 ? set_b : set_a;
          GbmModel tuned = base;
          CalibrationConfig cfg = calib_config;
          cfg.seed = mix_seed(calib_config.seed, static_cast<std::uint64_t>(subject),
                              static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(side));
          tune(tuned, gather(instances, tune_idx), cfg, exec);
          append_predictions(tuned, instances, eval_idx, exec, preds);
        }
      } catch (const config_error& e) {
        std::cerr << "warning: subject " << subject << " not tunable (" << e.what()
                  << "); skipping tuned CV\n";
        tuned_ok = false;
        break;
      } catch (const data_error& e) {
        std::cerr << "warning: subject " << subject << " not tunable (" << e.what()
                  << "); skipping tuned CV\n";
        tuned_ok = false;
        break;
      }
      pooled_preds[r].insert(pooled_preds[r].end(), preds.begin(), preds.end());
      rep_summaries.push_back(compute_metrics(std::move(preds), l, r == 0));
    }
    if (!tuned_ok) {
      cv.skipped_subjects.push_back(subject);
      // Drop any repetitions this subject already contributed.
      for (std::vector<ScoredPrediction>& pool : pooled_preds) {
        std::erase_if(pool, [&](const ScoredPrediction& sp) {
          return instances[sp.instance_id].subject_id == subject;
        });
      }
      continue;
    }
    cv.by_subject.emplace(subject, average_summaries(rep_summaries));
  }

  if (cv.by_subject.empty()) {
    throw data_error("tuned CV skipped every subject; nothing to report");
  }
  std::vector<EvalSummary> pooled_reps;
  pooled_reps.reserve(repetitions);
  for (int r = 0; r < repetitions; ++r) {
    pooled_reps.push_back(compute_metrics(std::move(pooled_preds[r]), l, r == 0));
  }
  cv.pooled = average_summaries(pooled_reps);
  return cv;
}

CvReport run_experiment(const std::vector<FeatureInstance>& instances,
                        const TrainConfig& train_config, const CalibrationConfig& calib_config,
                        int repetitions, Exec exec) {
  CvReport report;
  report.class_names = global_class_names(instances);
  report.subjects = sorted_subjects(instances);
  const FoldModelMap models = train_fold_models(instances, train_config, exec);
  report.baseline = run_baseline_cv(instances, train_config, exec, &models);
  report.tuned = run_tuned_cv(instances, train_config, calib_config, repetitions, exec, &models);
  return report;
}

}  // namespace actiboost
