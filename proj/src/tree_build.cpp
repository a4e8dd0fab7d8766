#include "actiboost/tree_build.hpp"

#include <algorithm>
#include <cmath>

namespace actiboost::tree_build {

namespace {

// Exact greedy scan of one feature. Rows sort by (value, row id) so equal
// values order deterministically; thresholds sit between adjacent distinct
// values, pinned to the left value whenever the midpoint rounds onto the
// right one (ties at the threshold route left).
SplitCandidate scan_feature(const std::vector<FeatureInstance>& data, const std::vector<int>& idx,
                            const std::vector<double>& target, int min_samples_leaf,
                            int feature) {
  const int n = static_cast<int>(idx.size());
  std::vector<int> order(idx);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double va = data[a].x[feature];
    const double vb = data[b].x[feature];
    if (va != vb) return va < vb;
    return a < b;
  });

  double total = 0.0;
  for (int i : order) total += target[i];
  const double base = total * total / n;

  SplitCandidate best;
  best.feature = feature;
  double left_sum = 0.0;
  for (int k = 0; k + 1 < n; ++k) {
    left_sum += target[order[k]];
    const int n_left = k + 1;
    const int n_right = n - n_left;
    if (n_left < min_samples_leaf) continue;
    if (n_right < min_samples_leaf) break;
    const double v = data[order[k]].x[feature];
    const double v_next = data[order[k + 1]].x[feature];
    if (!(v < v_next)) continue;
    const double right_sum = total - left_sum;
    const double gain =
        left_sum * left_sum / n_left + right_sum * right_sum / n_right - base;
    if (gain <= 0.0) continue;
    double threshold = 0.5 * (v + v_next);
    if (!(threshold < v_next)) threshold = v;
    if (!best.valid || gain > best.gain ||
        (gain == best.gain && threshold < best.threshold)) {
      best.valid = true;
      best.gain = gain;
      best.threshold = threshold;
    }
  }
  return best;
}

SplitCandidate reduce_candidates(const std::vector<SplitCandidate>& per_feature) {
  SplitCandidate best;
  for (const SplitCandidate& cand : per_feature) {
    if (!cand.valid) continue;
    if (!best.valid || cand.gain > best.gain) {
      best = cand;  // equal gains keep the lower feature index
    }
  }
  return best;
}

struct Builder {
  const std::vector<FeatureInstance>& data;
  const std::vector<double>& target;
  const std::vector<double>& hessian;
  GrowConfig config;
  Exec exec;
  std::vector<TreeNode> nodes;

  double leaf_value(const std::vector<int>& idx) const {
    double sum_t = 0.0, sum_h = 0.0;
    for (int i : idx) {
      sum_t += target[i];
      sum_h += hessian[i];
    }
    if (std::abs(sum_h) < 1e-150) return 0.0;
    return config.leaf_scale * sum_t / sum_h;
  }

  int build(const std::vector<int>& idx, int depth) {
    const int slot = static_cast<int>(nodes.size());
    nodes.emplace_back();

    SplitCandidate split;
    if (depth < config.max_depth &&
        static_cast<int>(idx.size()) >= 2 * config.min_samples_leaf) {
      split = best_split(data, idx, target, config.min_samples_leaf, exec);
    }
    if (!split.valid) {
      nodes[slot].feature = -1;
      nodes[slot].value = leaf_value(idx);
      return slot;
    }

    std::vector<int> left, right;
    left.reserve(idx.size());
    right.reserve(idx.size());
    for (int i : idx) {
      (data[i].x[split.feature] <= split.threshold ? left : right).push_back(i);
    }
    nodes[slot].feature = split.feature;
    nodes[slot].threshold = split.threshold;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    nodes[slot].left = l;
    nodes[slot].right = r;
    return slot;
  }
};

}  // namespace

SplitCandidate best_split(const std::vector<FeatureInstance>& data, const std::vector<int>& idx,
                          const std::vector<double>& target, int min_samples_leaf, Exec exec) {
  std::vector<SplitCandidate> per_feature(kFeatureCount);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int f = 0; f < kFeatureCount; ++f) {
      per_feature[f] = scan_feature(data, idx, target, min_samples_leaf, f);
    }
  } else {
    for (int f = 0; f < kFeatureCount; ++f) {
      per_feature[f] = scan_feature(data, idx, target, min_samples_leaf, f);
    }
  }
  return reduce_candidates(per_feature);
}

SplitCandidate best_split_ref(const std::vector<FeatureInstance>& data,
                              const std::vector<int>& idx, const std::vector<double>& target,
                              int min_samples_leaf) {
  std::vector<SplitCandidate> per_feature(kFeatureCount);
  for (int f = 0; f < kFeatureCount; ++f) {
    per_feature[f] = scan_feature(data, idx, target, min_samples_leaf, f);
  }
  return reduce_candidates(per_feature);
}

RegressionTree fit_tree(const std::vector<FeatureInstance>& data, const std::vector<int>& idx,
                        const std::vector<double>& target, const std::vector<double>& hessian,
                        const GrowConfig& config, Exec exec) {
  Builder builder{data, target, hessian, config, exec, {}};
  builder.build(idx, 0);
  RegressionTree tree;
  tree.nodes = std::move(builder.nodes);
  return tree;
}

}  // namespace actiboost::tree_build
