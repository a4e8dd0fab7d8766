#pragma once

// Independent reference implementations the unit and acceptance tests compare
// against. Each one recomputes its quantity from first principles, sharing no
// code with the library paths under test.

#include <algorithm>
#include <cmath>
#include <vector>

#include "actiboost/calibrate.hpp"
#include "actiboost/gbm.hpp"

namespace oracles {

using namespace actiboost;

// Central finite differences of the calibration loss over every weight.
inline std::vector<double> fd_gradient(GbmModel model, const std::vector<FeatureInstance>& batch,
                                       double step = 1e-5) {
  std::vector<double> fd(model.weights.size());
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    const double saved = model.weights[k];
    model.weights[k] = saved + step;
    const double up = loss(model, batch);
    model.weights[k] = saved - step;
    const double down = loss(model, batch);
    model.weights[k] = saved;
    fd[k] = (up - down) / (2.0 * step);
  }
  return fd;
}

// || a - b ||_2 / max(|| b ||_2, floor)
inline double relative_error(const std::vector<double>& a, const std::vector<double>& b,
                             double floor = 1e-12) {
  double diff = 0.0, ref = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff += (a[k] - b[k]) * (a[k] - b[k]);
    ref += b[k] * b[k];
  }
  return std::sqrt(diff) / std::max(std::sqrt(ref), floor);
}

// AUC as the all-pairs probability that a positive outscores a negative,
// ties counting one half.
inline double pairwise_auc(const std::vector<double>& scores,
                           const std::vector<char>& positive) {
  double wins = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!positive[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (positive[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return pairs == 0 ? 0.0 : wins / static_cast<double>(pairs);
}

// Walks a tree by scanning the node list directly, independent of
// RegressionTree::predict.
inline double walk_tree(const std::vector<TreeNode>& nodes, const double* x) {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    at = x[nodes[at].feature] <= nodes[at].threshold
             ? static_cast<std::size_t>(nodes[at].left)
             : static_cast<std::size_t>(nodes[at].right);
  }
  return nodes[at].value;
}

// Exhaustive best split: tries every (feature, threshold between adjacent
// distinct sorted values) pair and computes the variance-reduction gain by
// direct partition sums.
struct BruteSplit {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

inline BruteSplit brute_force_split(const std::vector<FeatureInstance>& data,
                                    const std::vector<int>& idx,
                                    const std::vector<double>& target, int min_samples_leaf) {
  BruteSplit best;
  const int n = static_cast<int>(idx.size());
  double total = 0.0;
  for (int i : idx) total += target[i];
  for (int f = 0; f < kFeatureCount; ++f) {
    std::vector<double> values;
    values.reserve(idx.size());
    for (int i : idx) values.push_back(data[i].x[f]);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      double thr = 0.5 * (values[k] + values[k + 1]);
      if (!(thr < values[k + 1])) thr = values[k];
      double left_sum = 0.0;
      int n_left = 0;
      for (int i : idx) {
        if (data[i].x[f] <= thr) {
          left_sum += target[i];
          ++n_left;
        }
      }
      const int n_right = n - n_left;
      if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / n_left + right_sum * right_sum / n_right -
                          total * total / n;
      if (gain <= 0.0) continue;
      const bool better =
          !best.valid || gain > best.gain ||
          (gain == best.gain && (f < best.feature ||
                                 (f == best.feature && thr < best.threshold)));
      if (better) {
        best.valid = true;
        best.feature = f;
        best.threshold = thr;
        best.gain = gain;
      }
    }
  }
  return best;
}

}  // namespace oracles
