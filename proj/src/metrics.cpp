#include "actiboost/metrics.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>

namespace actiboost {

std::vector<RocPoint> roc_points(const std::vector<double>& scores,
                                 const std::vector<char>& positive) {
  if (scores.size() != positive.size()) {
    throw std::invalid_argument("roc_points: scores and labels differ in length");
  }
  long p = 0, n = 0;
  for (char c : positive) (c ? p : n) += 1;
  if (p == 0 || n == 0) return {{0.0, 0.0}, {1.0, 1.0}};

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> points;
  points.push_back({0.0, 0.0});
  long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      (positive[order[i]] ? tp : fp) += 1;
      ++i;
    }
    points.push_back({static_cast<double>(fp) / n, static_cast<double>(tp) / p});
  }
  return points;
}

double roc_auc(const std::vector<double>& scores, const std::vector<char>& positive) {
  long p = 0, n = 0;
  for (char c : positive) (c ? p : n) += 1;
  if (p == 0 || n == 0) return 0.0;
  const std::vector<RocPoint> points = roc_points(scores, positive);
  double area = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k) {
    area += (points[k].fpr - points[k - 1].fpr) * (points[k].tpr + points[k - 1].tpr) * 0.5;
  }
  return area;
}

EvalSummary compute_metrics(std::vector<ScoredPrediction> predictions, int n_classes,
                            bool want_roc) {
  if (predictions.empty()) throw std::invalid_argument("compute_metrics: no predictions");
  std::sort(predictions.begin(), predictions.end(),
            [](const ScoredPrediction& a, const ScoredPrediction& b) {
              return a.instance_id < b.instance_id;
            });

  std::vector<long> confusion(static_cast<std::size_t>(n_classes) * n_classes, 0);
  for (const ScoredPrediction& sp : predictions) {
    if (sp.truth < 0 || sp.truth >= n_classes || sp.predicted < 0 ||
        sp.predicted >= n_classes) {
      throw std::invalid_argument("compute_metrics: class index out of range");
    }
    if (sp.proba.size() != static_cast<std::size_t>(n_classes)) {
      throw std::invalid_argument("compute_metrics: probability row length mismatch");
    }
    ++confusion[static_cast<std::size_t>(sp.truth) * n_classes + sp.predicted];
  }

  EvalSummary summary;
  summary.per_class.resize(n_classes);
  long correct = 0;
  for (int c = 0; c < n_classes; ++c) {
    correct += confusion[static_cast<std::size_t>(c) * n_classes + c];
  }
  summary.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());

  double f1_sum = 0.0;
  int f1_classes = 0;
  for (int c = 0; c < n_classes; ++c) {
    ClassMetrics& cm = summary.per_class[c];
    long support = 0, predicted = 0;
    for (int q = 0; q < n_classes; ++q) {
      support += confusion[static_cast<std::size_t>(c) * n_classes + q];
      predicted += confusion[static_cast<std::size_t>(q) * n_classes + c];
    }
    const long tp = confusion[static_cast<std::size_t>(c) * n_classes + c];
    cm.support = support;
    cm.accuracy = support > 0 ? static_cast<double>(tp) / support : 0.0;
    cm.precision = predicted > 0 ? static_cast<double>(tp) / predicted : 0.0;
    cm.f1 = (cm.precision + cm.accuracy) > 0.0
                ? 2.0 * cm.precision * cm.accuracy / (cm.precision + cm.accuracy)
                : 0.0;
    if (support > 0) {
      f1_sum += cm.f1;
      ++f1_classes;
    } else {
      std::cerr << "warning: class " << c << " has no true instances; its metrics are 0\n";
    }

    std::vector<double> scores(predictions.size());
    std::vector<char> positive(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      scores[i] = predictions[i].proba[c];
      positive[i] = predictions[i].truth == c ? 1 : 0;
    }
    cm.auc = roc_auc(scores, positive);
    if (want_roc) cm.roc = roc_points(scores, positive);
  }
  summary.macro_f1 = f1_classes > 0 ? f1_sum / f1_classes : 0.0;
  return summary;
}

}  // namespace actiboost
