#pragma once

#include <vector>

namespace actiboost {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct ClassMetrics {
  double accuracy = 0.0;  // recall of this class
  double precision = 0.0;
  double f1 = 0.0;  // 2PR/(P+R), 0 when P+R = 0
  double auc = 0.0;
  long support = 0;  // true instances of this class
  std::vector<RocPoint> roc;
};

struct EvalSummary {
  std::vector<ClassMetrics> per_class;
  double accuracy = 0.0;  // fraction of correct predictions
  double macro_f1 = 0.0;  // unweighted mean F1 over classes with support
};

// One evaluated instance. instance_id is the position in the full instance
// list; metrics sort by it so the same prediction set always yields the same
// summary regardless of evaluation order.
struct ScoredPrediction {
  long instance_id = 0;
  int truth = 0;
  int predicted = 0;
  std::vector<double> proba;
};

// One-vs-rest ROC as a threshold sweep from (0,0) to (1,1); equal scores
// collapse into one point, so the trace does not depend on input order.
std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<char>& positive);

// Trapezoid area under roc_points; equals the probability that a random
// positive outscores a random negative, ties counting one half. Degenerate
// inputs (no positives or no negatives) yield 0.
double roc_auc(const std::vector<double>& scores, const std::vector<char>& positive);

EvalSummary compute_metrics(std::vector<ScoredPrediction> predictions, int n_classes,
                            bool want_roc);

}  // namespace actiboost
