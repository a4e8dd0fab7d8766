#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actiboost/exec.hpp"
#include "actiboost/gbm.hpp"

namespace actiboost {

// full_jacobian differentiates the softmax completely and is what the
// finite-difference oracle validates; paper_diagonal keeps only the p = q
// term of the chain rule and is retained for fidelity experiments.
enum class GradientMode { full_jacobian, paper_diagonal };

GradientMode gradient_mode_from_string(const std::string& name);
const char* to_string(GradientMode mode);

struct CalibrationConfig {
  double learning_rate = 0.01;
  int batch_size = 32;  // clamped to the tuning-split size when larger
  int max_epochs = 200;
  double validation_fraction = 0.2;
  int patience = 20;  // epochs without validation improvement; <= 0 disables
  std::uint32_t seed = 0;
  GradientMode gradient_mode = GradientMode::full_jacobian;
};

struct EpochStat {
  int epoch = 0;  // 0 is the untouched model
  double train_loss = 0.0;
  double val_accuracy = 0.0;
};

struct CalibrationResult {
  std::vector<double> weights;  // selected W, row-major n_rounds x n_classes
  std::vector<EpochStat> history;
  int selected_epoch = 0;  // attains the max recorded val accuracy, earliest tie
};

// Mean over the batch of the per-instance squared probability error
// (1/l) * sum_p (truth_p - P_p)^2 against the one-hot truth.
double loss(const GbmModel& model, const std::vector<FeatureInstance>& batch);

// d loss / d w, averaged over the batch; row-major n_rounds x n_classes.
// Per-instance contributions are computed independently and summed in
// instance order, so the parallel kernel matches the serial reference
// bitwise.
std::vector<double> gradient(const GbmModel& model, const std::vector<FeatureInstance>& batch,
                             GradientMode mode = GradientMode::full_jacobian,
                             Exec exec = Exec::parallel);
std::vector<double> gradient_ref(const GbmModel& model, const std::vector<FeatureInstance>& batch,
                                 GradientMode mode = GradientMode::full_jacobian);

// W <- W - learning_rate * gradient; nothing else in the model changes.
void sgd_step(GbmModel& model, const std::vector<FeatureInstance>& batch, double learning_rate,
              GradientMode mode = GradientMode::full_jacobian, Exec exec = Exec::parallel);

// Mini-batch SGD on the weight matrix with a stratified validation split and
// accuracy-based snapshot selection. Mutates only model.weights, leaving it
// at the selected snapshot. Deterministic for fixed inputs and seed.
CalibrationResult tune(GbmModel& model, const std::vector<FeatureInstance>& user_data,
                       const CalibrationConfig& config, Exec exec = Exec::parallel);

// CSV: epoch,train_loss,val_accuracy; one row per history entry.
void write_history_csv(const CalibrationResult& result, const std::string& path);

}  // namespace actiboost
