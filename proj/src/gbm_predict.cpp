#include "actiboost/gbm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace actiboost {

namespace {

void check_dim(std::span<const double> x) {
  if (x.size() != static_cast<std::size_t>(kFeatureCount)) {
    throw std::invalid_argument("feature vector has wrong dimensionality: expected " +
                                std::to_string(kFeatureCount) + ", got " +
                                std::to_string(x.size()));
  }
}

}  // namespace

double RegressionTree::predict(std::span<const double> x) const {
  int node = 0;
  while (!nodes[node].is_leaf()) {
    const TreeNode& nd = nodes[node];
    node = (x[nd.feature] <= nd.threshold) ? nd.left : nd.right;
  }
  return nodes[node].value;
}

int GbmModel::class_index(Activity a) const {
  const std::string name = to_string(a);
  for (std::size_t p = 0; p < class_names.size(); ++p) {
    if (class_names[p] == name) return static_cast<int>(p);
  }
  return -1;
}

std::vector<double> softmax(std::span<const double> scores) {
  std::vector<double> out(scores.size());
  double max_score = scores[0];
  for (double s : scores) max_score = std::max(max_score, s);
  double sum = 0.0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    out[p] = std::exp(scores[p] - max_score);
    sum += out[p];
  }
  for (double& v : out) v /= sum;
  return out;
}

int argmax_index(std::span<const double> values) {
  int best = 0;
  for (int p = 1; p < static_cast<int>(values.size()); ++p) {
    if (values[p] > values[best]) best = p;
  }
  return best;
}

void decision_outputs(const GbmModel& model, std::span<const double> x,
                      std::vector<double>& phi) {
  check_dim(x);
  phi.resize(static_cast<std::size_t>(model.n_rounds) * model.n_classes);
  for (int j = 0; j < model.n_rounds; ++j) {
    for (int p = 0; p < model.n_classes; ++p) {
      phi[static_cast<std::size_t>(j) * model.n_classes + p] =
          model.estimators[j][p].predict(x);
    }
  }
}

std::vector<double> decision_outputs(const GbmModel& model, std::span<const double> x) {
  std::vector<double> phi;
  decision_outputs(model, x, phi);
  return phi;
}

std::vector<double> score(const GbmModel& model, std::span<const double> x) {
  check_dim(x);
  std::vector<double> f(model.init_scores.begin(), model.init_scores.end());
  for (int j = 0; j < model.n_rounds; ++j) {
    for (int p = 0; p < model.n_classes; ++p) {
      f[p] += model.weight(j, p) * model.estimators[j][p].predict(x);
    }
  }
  return f;
}

std::vector<double> predict_proba(const GbmModel& model, std::span<const double> x) {
  return softmax(score(model, x));
}

int predict(const GbmModel& model, std::span<const double> x) {
  const std::vector<double> f = score(model, x);
  return argmax_index(f);
}

std::vector<double> batch_scores(const GbmModel& model,
                                 const std::vector<FeatureInstance>& instances, Exec exec) {
  const std::size_t n = instances.size();
  const std::size_t l = model.n_classes;
  std::vector<double> out(n * l);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      const std::vector<double> f = score(model, instances[i].x);
      std::copy(f.begin(), f.end(), out.begin() + i * l);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> f = score(model, instances[i].x);
      std::copy(f.begin(), f.end(), out.begin() + i * l);
    }
  }
  return out;
}

std::vector<double> batch_scores_ref(const GbmModel& model,
                                     const std::vector<FeatureInstance>& instances) {
  return batch_scores(model, instances, Exec::serial);
}

std::vector<double> batch_probabilities(const GbmModel& model,
                                        const std::vector<FeatureInstance>& instances,
                                        Exec exec) {
  const std::size_t l = model.n_classes;
  std::vector<double> out = batch_scores(model, instances, exec);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(instances.size()); ++i) {
      const std::vector<double> p =
          softmax(std::span<const double>(out.data() + i * l, l));
      std::copy(p.begin(), p.end(), out.begin() + i * l);
    }
  } else {
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const std::vector<double> p =
          softmax(std::span<const double>(out.data() + i * l, l));
      std::copy(p.begin(), p.end(), out.begin() + i * l);
    }
  }
  return out;
}

std::vector<double> batch_probabilities_ref(const GbmModel& model,
                                            const std::vector<FeatureInstance>& instances) {
  return batch_probabilities(model, instances, Exec::serial);
}

double accuracy(const GbmModel& model, const std::vector<FeatureInstance>& instances,
                Exec exec) {
  if (instances.empty()) throw std::invalid_argument("accuracy needs at least one instance");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(instances.size());
  long correct = 0;
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) reduction(+ : correct)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (predict(model, instances[i].x) == model.class_index(instances[i].label)) {
        ++correct;
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (predict(model, instances[i].x) == model.class_index(instances[i].label)) {
        ++correct;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace actiboost
