#include "actiboost/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <stdexcept>

#include "actiboost/errors.hpp"

namespace actiboost {

namespace {

void check_labels(const GbmModel& model, const std::vector<FeatureInstance>& batch) {
  if (batch.empty()) throw std::invalid_argument("batch is empty");
  for (const FeatureInstance& inst : batch) {
    if (model.class_index(inst.label) < 0) {
      throw std::invalid_argument(std::string("label ") + to_string(inst.label) +
                                  " is not among the model's classes");
    }
  }
}

// Per-instance gradient contribution, accumulated into grad (n_rounds x l).
void add_instance_gradient(const GbmModel& model, const FeatureInstance& inst,
                           GradientMode mode, std::vector<double>& phi,
                           std::vector<double>& grad) {
  const int l = model.n_classes;
  const int truth = model.class_index(inst.label);
  decision_outputs(model, inst.x, phi);

  std::vector<double> f(model.init_scores.begin(), model.init_scores.end());
  for (int j = 0; j < model.n_rounds; ++j) {
    for (int p = 0; p < l; ++p) {
      f[p] += model.weight(j, p) * phi[static_cast<std::size_t>(j) * l + p];
    }
  }
  const std::vector<double> prob = softmax(f);

  // err_p = P_p - truth_p, the sign that makes descent W -= lr * grad.
  std::vector<double> coeff(l);
  if (mode == GradientMode::full_jacobian) {
    double c = 0.0;
    for (int p = 0; p < l; ++p) c += (prob[p] - (p == truth ? 1.0 : 0.0)) * prob[p];
    for (int q = 0; q < l; ++q) {
      const double err_q = prob[q] - (q == truth ? 1.0 : 0.0);
      coeff[q] = (2.0 / l) * prob[q] * (err_q - c);
    }
  } else {
    for (int p = 0; p < l; ++p) {
      const double err_p = prob[p] - (p == truth ? 1.0 : 0.0);
      coeff[p] = (2.0 / l) * err_p * (prob[p] - prob[p] * prob[p]);
    }
  }
  for (int j = 0; j < model.n_rounds; ++j) {
    for (int p = 0; p < l; ++p) {
      const std::size_t k = static_cast<std::size_t>(j) * l + p;
      grad[k] += coeff[p] * phi[k];
    }
  }
}

}  // namespace

GradientMode gradient_mode_from_string(const std::string& name) {
  if (name == "full_jacobian") return GradientMode::full_jacobian;
  if (name == "paper_diagonal") return GradientMode::paper_diagonal;
  throw config_error("unknown gradient mode: " + name);
}

const char* to_string(GradientMode mode) {
  return mode == GradientMode::full_jacobian ? "full_jacobian" : "paper_diagonal";
}

double loss(const GbmModel& model, const std::vector<FeatureInstance>& batch) {
  check_labels(model, batch);
  const int l = model.n_classes;
  double total = 0.0;
  for (const FeatureInstance& inst : batch) {
    const std::vector<double> prob = predict_proba(model, inst.x);
    const int truth = model.class_index(inst.label);
    double sq = 0.0;
    for (int p = 0; p < l; ++p) {
      const double d = (p == truth ? 1.0 : 0.0) - prob[p];
      sq += d * d;
    }
    total += sq / l;
  }
  return total / static_cast<double>(batch.size());
}

std::vector<double> gradient(const GbmModel& model, const std::vector<FeatureInstance>& batch,
                             GradientMode mode, Exec exec) {
  check_labels(model, batch);
  const std::size_t w = model.weights.size();
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(batch.size());
  std::vector<std::vector<double>> slots(batch.size());
  if (exec == Exec::parallel) {
#pragma omp parallel
    {
      std::vector<double> phi;
#pragma omp for schedule(static)
      for (std::ptrdiff_t i = 0; i < m; ++i) {
        slots[i].assign(w, 0.0);
        add_instance_gradient(model, batch[i], mode, phi, slots[i]);
      }
    }
  } else {
    std::vector<double> phi;
    for (std::ptrdiff_t i = 0; i < m; ++i) {
      slots[i].assign(w, 0.0);
      add_instance_gradient(model, batch[i], mode, phi, slots[i]);
    }
  }
  std::vector<double> grad(w, 0.0);
  for (std::ptrdiff_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < w; ++k) grad[k] += slots[i][k];
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  for (double& g : grad) g *= inv_m;
  return grad;
}

std::vector<double> gradient_ref(const GbmModel& model,
                                 const std::vector<FeatureInstance>& batch, GradientMode mode) {
  return gradient(model, batch, mode, Exec::serial);
}

void sgd_step(GbmModel& model, const std::vector<FeatureInstance>& batch, double learning_rate,
              GradientMode mode, Exec exec) {
  const std::vector<double> grad = gradient(model, batch, mode, exec);
  for (std::size_t k = 0; k < model.weights.size(); ++k) {
    model.weights[k] -= learning_rate * grad[k];
  }
}

CalibrationResult tune(GbmModel& model, const std::vector<FeatureInstance>& user_data,
                       const CalibrationConfig& config, Exec exec) {
  if (!(config.learning_rate > 0.0)) throw config_error("learning_rate must be positive");
  if (config.batch_size < 1) throw config_error("batch_size must be at least 1");
  if (config.max_epochs < 0) throw config_error("max_epochs must be non-negative");
  if (!(config.validation_fraction > 0.0) || !(config.validation_fraction < 1.0)) {
    throw config_error("validation_fraction must be in (0, 1)");
  }
  check_labels(model, user_data);

  // Stratified split: per class, shuffle and send the first
  // floor(validation_fraction * n_c) rows to validation.
  std::mt19937 rng(config.seed);
  std::vector<std::vector<int>> by_class(model.n_classes);
  for (std::size_t i = 0; i < user_data.size(); ++i) {
    by_class[model.class_index(user_data[i].label)].push_back(static_cast<int>(i));
  }
  std::vector<FeatureInstance> train_set, val_set;
  for (std::vector<int>& group : by_class) {
    std::shuffle(group.begin(), group.end(), rng);
    const int n_val = static_cast<int>(config.validation_fraction * group.size());
    for (std::size_t k = 0; k < group.size(); ++k) {
      (static_cast<int>(k) < n_val ? val_set : train_set).push_back(user_data[group[k]]);
    }
  }
  if (train_set.empty() || val_set.empty()) {
    throw config_error("validation split left an empty side: " +
                       std::to_string(train_set.size()) + " train, " +
                       std::to_string(val_set.size()) + " validation");
  }
  int train_classes = 0;
  {
    std::vector<char> seen(model.n_classes, 0);
    for (const FeatureInstance& inst : train_set) {
      seen[model.class_index(inst.label)] = 1;
    }
    for (char s : seen) train_classes += s;
  }
  if (train_classes < 2) {
    throw data_error("tuning split covers fewer than two classes");
  }

  const int batch_size = std::min<int>(config.batch_size, static_cast<int>(train_set.size()));

  CalibrationResult result;
  result.history.push_back({0, loss(model, train_set), accuracy(model, val_set, exec)});
  result.weights = model.weights;
  result.selected_epoch = 0;
  double best_acc = result.history[0].val_accuracy;

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<FeatureInstance> batch;
  batch.reserve(batch_size);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(train_set[order[k]]);
      sgd_step(model, batch, config.learning_rate, config.gradient_mode, exec);
    }
    const double train_loss = loss(model, train_set);
    const double val_acc = accuracy(model, val_set, exec);
    result.history.push_back({epoch, train_loss, val_acc});
    if (val_acc > best_acc) {
      best_acc = val_acc;
      result.weights = model.weights;
      result.selected_epoch = epoch;
    }
    if (config.patience > 0 && epoch - result.selected_epoch >= config.patience) break;
  }

  model.weights = result.weights;
  return result;
}

void write_history_csv(const CalibrationResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open history file for writing: " + path);
  out << "epoch,train_loss,val_accuracy\n";
  char buf[128];
  for (const EpochStat& row : result.history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", row.epoch, row.train_loss,
                  row.val_accuracy);
    out << buf;
  }
  if (!out) throw data_error("failed writing history file: " + path);
}

}  // namespace actiboost
