#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "actiboost/exec.hpp"
#include "actiboost/types.hpp"

namespace actiboost {

struct TreeNode {
  int feature = -1;        // -1 marks a leaf
  double threshold = 0.0;  // x[feature] <= threshold routes left
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
  bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
  double predict(std::span<const double> x) const;
};

struct TrainConfig {
  int n_rounds = 100;
  int max_depth = 3;
  int min_samples_leaf = 5;
  double shrinkage = 0.1;  // applied through the weight matrix, not the leaves
  double subsample = 1.0;
  std::uint32_t seed = 0;
};

// Multiclass boosted ensemble. Trees store raw Newton-step leaf values; the
// shrinkage lives in the weight matrix, so a freshly trained model has every
// weight equal to the training shrinkage and calibration updates exactly the
// quantity the class score sums over.
struct GbmModel {
  int n_classes = 0;
  int n_rounds = 0;
  std::vector<std::string> class_names;  // class index = position
  std::vector<double> init_scores;       // length n_classes
  std::vector<std::vector<RegressionTree>> estimators;  // [round][class]
  std::vector<double> weights;  // row-major [round * n_classes + class]
  double shrinkage = 0.0;       // initial value of every weight

  double weight(int round, int cls) const { return weights[round * n_classes + cls]; }
  double& weight(int round, int cls) { return weights[round * n_classes + cls]; }
  int class_index(Activity a) const;  // -1 if the class is not in the model
};

struct TrainStats {
  // Mean multinomial deviance on the training set; entry 0 is the prior-only
  // model, entry j the ensemble after round j.
  std::vector<double> deviance;
};

GbmModel train(const std::vector<FeatureInstance>& instances, const TrainConfig& config,
               TrainStats* stats = nullptr, Exec exec = Exec::parallel);

// phi[j * n_classes + p] = leaf value of estimators[j][p] at x.
void decision_outputs(const GbmModel& model, std::span<const double> x, std::vector<double>& phi);
std::vector<double> decision_outputs(const GbmModel& model, std::span<const double> x);

// f_p = init_scores[p] + sum_j weight(j,p) * phi_jp(x)
std::vector<double> score(const GbmModel& model, std::span<const double> x);

// Softmax of the class scores, max-subtracted for overflow safety.
std::vector<double> predict_proba(const GbmModel& model, std::span<const double> x);

// Argmax class index; ties break toward the lowest index.
int predict(const GbmModel& model, std::span<const double> x);

std::vector<double> softmax(std::span<const double> f);
int argmax_index(std::span<const double> v);

// Batch kernels, row-major n_instances x n_classes. Parallel and serial
// reference twins are bitwise-equal.
std::vector<double> batch_scores(const GbmModel& model,
                                 const std::vector<FeatureInstance>& instances,
                                 Exec exec = Exec::parallel);
std::vector<double> batch_scores_ref(const GbmModel& model,
                                     const std::vector<FeatureInstance>& instances);
std::vector<double> batch_probabilities(const GbmModel& model,
                                        const std::vector<FeatureInstance>& instances,
                                        Exec exec = Exec::parallel);
std::vector<double> batch_probabilities_ref(const GbmModel& model,
                                            const std::vector<FeatureInstance>& instances);

// Fraction of instances whose predicted class matches the label.
double accuracy(const GbmModel& model, const std::vector<FeatureInstance>& instances,
                Exec exec = Exec::parallel);

}  // namespace actiboost
