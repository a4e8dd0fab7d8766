#pragma once

#include <map>
#include <string>
#include <vector>

#include "actiboost/calibrate.hpp"
#include "actiboost/exec.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/metrics.hpp"

namespace actiboost {

struct CvFold {
  int held_out_subject = 0;
  std::vector<long> train_idx;
  std::vector<long> test_idx;
};

// One fold per subject, ordered by subject id. Throws data_error when fewer
// than two subjects are present.
std::vector<CvFold> make_loso_folds(const std::vector<FeatureInstance>& instances);

using FoldModelMap = std::map<int, GbmModel>;

// Trains one model per held-out subject on everybody else's instances; fold
// seeds derive deterministically from config.seed and the subject id. Folds
// run in parallel into per-fold slots. Throws data_error naming the class if
// some fold's training half lacks one.
FoldModelMap train_fold_models(const std::vector<FeatureInstance>& instances,
                               const TrainConfig& config, Exec exec = Exec::parallel);

struct BaselineCv {
  std::map<int, EvalSummary> by_subject;
  EvalSummary pooled;  // all held-out predictions pooled across subjects
};

BaselineCv run_baseline_cv(const std::vector<FeatureInstance>& instances,
                           const TrainConfig& train_config, Exec exec = Exec::parallel,
                           const FoldModelMap* fold_models = nullptr);

struct TunedEval {
  // Scalar fields averaged over repetitions; roc traces from repetition 0.
  EvalSummary mean;
  double macro_f1_std = 0.0;  // sample standard deviation over repetitions
};

struct TunedCv {
  int repetitions = 0;
  std::map<int, TunedEval> by_subject;
  TunedEval pooled;
  std::vector<int> skipped_subjects;  // too small to split or to tune
};

// Per subject and repetition: halve the subject's data into stratified sets,
// tune a copy of the fold model on one half with the other held out, both
// ways, and evaluate the union. Every prediction comes from a model that
// never saw that instance during training or tuning.
TunedCv run_tuned_cv(const std::vector<FeatureInstance>& instances,
                     const TrainConfig& train_config, const CalibrationConfig& calib_config,
                     int repetitions, Exec exec = Exec::parallel,
                     const FoldModelMap* fold_models = nullptr);

struct CvReport {
  std::vector<std::string> class_names;
  std::vector<int> subjects;
  BaselineCv baseline;
  TunedCv tuned;
  std::string config_hash;
};

// Baseline and tuned one-user-out CV sharing one set of fold models.
CvReport run_experiment(const std::vector<FeatureInstance>& instances,
                        const TrainConfig& train_config, const CalibrationConfig& calib_config,
                        int repetitions, Exec exec = Exec::parallel);

// report.json plus f1_table.csv and class_accuracy.csv under out_dir; with
// roc_csv also roc/<subject>_<class>.csv point lists. See
// docs/report_format.md.
void emit_report(const CvReport& report, const std::string& out_dir, bool roc_csv = false);
CvReport load_report(const std::string& json_path);

}  // namespace actiboost
