#pragma once

// Tree-construction internals, exposed for the oracle tests and the
// serial-vs-parallel benchmark.

#include <vector>

#include "actiboost/exec.hpp"
#include "actiboost/gbm.hpp"

namespace actiboost::tree_build {

struct SplitCandidate {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // sum_L^2/n_L + sum_R^2/n_R - sum^2/n over the targets
};

struct GrowConfig {
  int max_depth = 3;
  int min_samples_leaf = 5;
  double leaf_scale = 1.0;  // (l-1)/l Newton factor for multiclass deviance
};

// Exact greedy search over all features and thresholds for the node holding
// rows `idx`. Feature scans run in parallel into per-feature slots and the
// winner is reduced in feature order, so results match the serial reference
// bitwise. Ties break toward the lower feature index, then lower threshold.
SplitCandidate best_split(const std::vector<FeatureInstance>& data, const std::vector<int>& idx,
                          const std::vector<double>& target, int min_samples_leaf, Exec exec);
SplitCandidate best_split_ref(const std::vector<FeatureInstance>& data,
                              const std::vector<int>& idx, const std::vector<double>& target,
                              int min_samples_leaf);

// Fit one regression tree to `target` by variance reduction; leaf values are
// single Newton steps leaf_scale * sum(target) / sum(hessian), zero when the
// hessian sum vanishes.
RegressionTree fit_tree(const std::vector<FeatureInstance>& data, const std::vector<int>& idx,
                        const std::vector<double>& target, const std::vector<double>& hessian,
                        const GrowConfig& config, Exec exec = Exec::parallel);

}  // namespace actiboost::tree_build
