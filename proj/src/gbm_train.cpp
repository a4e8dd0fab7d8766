#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "actiboost/errors.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/tree_build.hpp"

namespace actiboost {

namespace {

void validate_config(const TrainConfig& c) {
  if (c.n_rounds < 1) throw config_error("n_rounds must be at least 1");
  if (c.max_depth < 1) throw config_error("max_depth must be at least 1");
  if (c.min_samples_leaf < 1) throw config_error("min_samples_leaf must be at least 1");
  if (!(c.shrinkage > 0.0) || c.shrinkage > 1.0) {
    throw config_error("shrinkage must be in (0, 1]");
  }
  if (!(c.subsample > 0.0) || c.subsample > 1.0) {
    throw config_error("subsample must be in (0, 1]");
  }
}

// Row-softmax of F into P, one slot per instance.
void softmax_rows(const std::vector<double>& f, int l, std::vector<double>& p, Exec exec) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size()) / l;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::vector<double> row =
          softmax(std::span<const double>(f.data() + i * l, l));
      std::copy(row.begin(), row.end(), p.begin() + i * l);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::vector<double> row =
          softmax(std::span<const double>(f.data() + i * l, l));
      std::copy(row.begin(), row.end(), p.begin() + i * l);
    }
  }
}

double mean_deviance(const std::vector<double>& p, const std::vector<int>& y, int l) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    sum += -std::log(std::max(p[i * l + y[i]], 1e-300));
  }
  return sum / static_cast<double>(y.size());
}

}  // namespace

GbmModel train(const std::vector<FeatureInstance>& instances, const TrainConfig& config,
               TrainStats* stats, Exec exec) {
  validate_config(config);
  if (instances.empty()) throw std::invalid_argument("training set is empty");

  std::map<Activity, int> counts;
  for (const FeatureInstance& inst : instances) ++counts[inst.label];
  if (counts.size() < 2) {
    throw data_error("training requires at least two classes, got " +
                     std::to_string(counts.size()));
  }
  for (const auto& [activity, count] : counts) {
    if (count < config.min_samples_leaf) {
      throw data_error(std::string("class ") + to_string(activity) + " has " +
                       std::to_string(count) +
                       " instances, fewer than min_samples_leaf=" +
                       std::to_string(config.min_samples_leaf));
    }
  }

  const int l = static_cast<int>(counts.size());
  const int n = static_cast<int>(instances.size());

  GbmModel model;
  model.n_classes = l;
  model.n_rounds = config.n_rounds;
  model.shrinkage = config.shrinkage;
  std::map<Activity, int> class_of;
  for (const auto& [activity, count] : counts) {
    class_of[activity] = static_cast<int>(model.class_names.size());
    model.class_names.push_back(to_string(activity));
    model.init_scores.push_back(std::log(static_cast<double>(count) / n));
  }

  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) y[i] = class_of.at(instances[i].label);

  std::vector<double> f(static_cast<std::size_t>(n) * l);
  for (int i = 0; i < n; ++i) {
    std::copy(model.init_scores.begin(), model.init_scores.end(), f.begin() + i * l);
  }
  std::vector<double> p(f.size());
  std::vector<double> residual(n), hessian(n);

  std::mt19937 rng(config.seed);
  std::vector<int> all_rows(n);
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const int sample_size =
      config.subsample < 1.0
          ? std::max(1, static_cast<int>(config.subsample * n))
          : n;

  const tree_build::GrowConfig grow{config.max_depth, config.min_samples_leaf,
                                    static_cast<double>(l - 1) / l};
  model.estimators.resize(config.n_rounds);
  if (stats) {
    stats->deviance.clear();
    stats->deviance.reserve(config.n_rounds + 1);
  }

  std::vector<int> sample = all_rows;
  for (int j = 0; j < config.n_rounds; ++j) {
    softmax_rows(f, l, p, exec);
    if (stats) stats->deviance.push_back(mean_deviance(p, y, l));

    if (sample_size < n) {
      std::vector<int> pool = all_rows;
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(sample_size);
      std::sort(pool.begin(), pool.end());
      sample = std::move(pool);
    }

    model.estimators[j].reserve(l);
    for (int cls = 0; cls < l; ++cls) {
      for (int i = 0; i < n; ++i) {
        const double prob = p[static_cast<std::size_t>(i) * l + cls];
        residual[i] = (y[i] == cls ? 1.0 : 0.0) - prob;
        hessian[i] = prob * (1.0 - prob);
      }
      RegressionTree tree = tree_build::fit_tree(instances, sample, residual, hessian, grow, exec);
      if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
          f[static_cast<std::size_t>(i) * l + cls] +=
              config.shrinkage * tree.predict(instances[i].x);
        }
      } else {
        for (int i = 0; i < n; ++i) {
          f[static_cast<std::size_t>(i) * l + cls] +=
              config.shrinkage * tree.predict(instances[i].x);
        }
      }
      model.estimators[j].push_back(std::move(tree));
    }
  }
  if (stats) {
    softmax_rows(f, l, p, exec);
    stats->deviance.push_back(mean_deviance(p, y, l));
  }

  model.weights.assign(static_cast<std::size_t>(config.n_rounds) * l, config.shrinkage);
  return model;
}

}  // namespace actiboost
