#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "actiboost/calibrate.hpp"
#include "actiboost/errors.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/gbm_io.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace actiboost;

namespace {

GbmModel jittered_model(const std::vector<FeatureInstance>& data, unsigned seed) {
  GbmModel model = fixtures::small_model(data);
  std::mt19937 rng(seed);
  fixtures::jitter_weights(model, rng);
  return model;
}

}  // namespace

TEST_CASE("loss matches a direct computation") {
  const auto data = fixtures::separable_instances(2, 4);
  const GbmModel model = jittered_model(data, 3);

  const std::vector<FeatureInstance> batch(data.begin(), data.begin() + 16);
  double expect = 0.0;
  for (const FeatureInstance& inst : batch) {
    const std::vector<double> p = predict_proba(model, inst.x);
    const int truth = model.class_index(inst.label);
    REQUIRE(truth >= 0);
    double s = 0.0;
    for (int q = 0; q < model.n_classes; ++q) {
      const double t = q == truth ? 1.0 : 0.0;
      s += (t - p[q]) * (t - p[q]);
    }
    expect += s / model.n_classes;
  }
  expect /= batch.size();
  CHECK(std::abs(loss(model, batch) - expect) < 1e-14);

  CHECK_THROWS_AS(loss(model, {}), std::invalid_argument);
}

TEST_CASE("full-jacobian gradient matches finite differences") {
  std::mt19937 rng(29);
  const auto data = fixtures::separable_instances(2, 4);
  for (int trial = 0; trial < 5; ++trial) {
    GbmModel model = jittered_model(data, 100 + trial);
    std::vector<FeatureInstance> batch(data.begin() + trial, data.begin() + trial + 12);

    const auto grad = gradient(model, batch, GradientMode::full_jacobian);
    const auto fd = oracles::fd_gradient(model, batch);
    REQUIRE(grad.size() == fd.size());
    CHECK(oracles::relative_error(grad, fd) < 1e-6);
  }
}

TEST_CASE("diagonal gradient matches its formula, not the full derivative") {
  const auto data = fixtures::separable_instances(2, 4);
  GbmModel model = jittered_model(data, 7);
  const std::vector<FeatureInstance> batch(data.begin(), data.begin() + 10);

  // Direct implementation of the diagonal rule.
  const int l = model.n_classes;
  std::vector<double> expect(model.weights.size(), 0.0);
  for (const FeatureInstance& inst : batch) {
    const std::vector<double> phi = decision_outputs(model, inst.x);
    const std::vector<double> p = predict_proba(model, inst.x);
    const int truth = model.class_index(inst.label);
    for (int q = 0; q < l; ++q) {
      const double err = p[q] - (q == truth ? 1.0 : 0.0);
      const double coeff = 2.0 / l * err * (p[q] - p[q] * p[q]);
      for (int j = 0; j < model.n_rounds; ++j) {
        expect[j * l + q] += coeff * phi[j * l + q];
      }
    }
  }
  for (double& g : expect) g /= batch.size();

  const auto diag = gradient(model, batch, GradientMode::paper_diagonal);
  REQUIRE(diag.size() == expect.size());
  CHECK(oracles::relative_error(diag, expect) < 1e-12);

  const auto fd = oracles::fd_gradient(model, batch);
  CHECK(oracles::relative_error(diag, fd) > 1e-3);

  CHECK_THROWS_AS(gradient_mode_from_string("newton"), config_error);
  CHECK(gradient_mode_from_string("full_jacobian") == GradientMode::full_jacobian);
  CHECK(gradient_mode_from_string("paper_diagonal") == GradientMode::paper_diagonal);
}

TEST_CASE("gradient parallel matches serial bitwise") {
  const auto data = fixtures::separable_instances(2, 6);
  GbmModel model = jittered_model(data, 11);
  for (GradientMode mode : {GradientMode::full_jacobian, GradientMode::paper_diagonal}) {
    const auto par = gradient(model, data, mode, Exec::parallel);
    const auto ser = gradient_ref(model, data, mode);
    CHECK(par == ser);
  }
}

TEST_CASE("sgd_step touches only the weights") {
  const auto data = fixtures::separable_instances(2, 4);
  GbmModel model = jittered_model(data, 13);
  const std::string trees_before = serialize_trees(model);
  const std::vector<double> weights_before = model.weights;
  const std::vector<FeatureInstance> batch(data.begin(), data.begin() + 20);

  const auto grad = gradient(model, batch);
  sgd_step(model, batch, 0.5);

  CHECK(serialize_trees(model) == trees_before);
  REQUIRE(model.weights.size() == weights_before.size());
  bool changed = false;
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    CHECK(model.weights[i] == weights_before[i] - 0.5 * grad[i]);
    changed |= model.weights[i] != weights_before[i];
  }
  CHECK(changed);
}

TEST_CASE("tune validates its inputs") {
  const auto data = fixtures::separable_instances(2, 4);
  GbmModel model = fixtures::small_model(data);
  CalibrationConfig cfg;

  CalibrationConfig bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(tune(model, data, bad), config_error);
  bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(tune(model, data, bad), config_error);
  bad = cfg;
  bad.max_epochs = -1;
  CHECK_THROWS_AS(tune(model, data, bad), config_error);
  bad = cfg;
  bad.validation_fraction = 1.0;
  CHECK_THROWS_AS(tune(model, data, bad), config_error);
  bad = cfg;
  bad.validation_fraction = -0.1;
  CHECK_THROWS_AS(tune(model, data, bad), config_error);

  CHECK_THROWS_AS(tune(model, {}, cfg), std::invalid_argument);

  // Too little data to stratify: a class whose two instances cannot split
  // into train and validation leaves an empty side.
  std::vector<FeatureInstance> tiny(data.begin(), data.begin() + 2);
  tiny[1] = *std::find_if(data.begin(), data.end(), [&](const FeatureInstance& i) {
    return i.label != tiny[0].label;
  });
  CHECK_THROWS_AS(tune(model, tiny, cfg), config_error);

  // Labels outside the model vocabulary are rejected up front.
  std::vector<FeatureInstance> walk_rest;
  for (const FeatureInstance& inst : data) {
    if (inst.label != Activity::bike) walk_rest.push_back(inst);
  }
  GbmModel narrow = fixtures::small_model(walk_rest, 5);
  CHECK_THROWS_AS(tune(narrow, data, cfg), std::invalid_argument);
}

TEST_CASE("tune history and snapshot selection") {
  const auto data = fixtures::separable_instances(3, 6);
  GbmModel model = jittered_model(data, 19);
  const std::string trees_before = serialize_trees(model);

  CalibrationConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 16;
  cfg.max_epochs = 25;
  cfg.validation_fraction = 0.25;
  cfg.patience = 0;  // run every epoch
  cfg.seed = 5;

  GbmModel tuned = model;
  const CalibrationResult res = tune(tuned, data, cfg);

  REQUIRE(!res.history.empty());
  CHECK(res.history.front().epoch == 0);
  CHECK(res.history.size() == 26);
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    CHECK(res.history[i].epoch == static_cast<int>(i));
    CHECK(std::isfinite(res.history[i].train_loss));
    CHECK(res.history[i].val_accuracy >= 0.0);
    CHECK(res.history[i].val_accuracy <= 1.0);
  }

  double best = -1.0;
  int earliest = -1;
  for (const EpochStat& e : res.history) {
    if (e.val_accuracy > best) {
      best = e.val_accuracy;
      earliest = e.epoch;
    }
  }
  CHECK(res.selected_epoch == earliest);
  CHECK(tuned.weights == res.weights);
  CHECK(serialize_trees(tuned) == trees_before);

  // Zero epochs: nothing moves, history still records the starting point.
  GbmModel frozen = model;
  CalibrationConfig zero = cfg;
  zero.max_epochs = 0;
  const CalibrationResult none = tune(frozen, data, zero);
  CHECK(none.history.size() == 1);
  CHECK(none.selected_epoch == 0);
  CHECK(frozen.weights == model.weights);

  // Determinism: same seed, same result; different seed may differ.
  GbmModel rerun = model;
  const CalibrationResult res2 = tune(rerun, data, cfg);
  CHECK(rerun.weights == tuned.weights);
  CHECK(res2.selected_epoch == res.selected_epoch);
  REQUIRE(res2.history.size() == res.history.size());
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    CHECK(res2.history[i].train_loss == res.history[i].train_loss);
    CHECK(res2.history[i].val_accuracy == res.history[i].val_accuracy);
  }

  // Oversized batches clamp to the training split.
  GbmModel big = model;
  CalibrationConfig bigbatch = cfg;
  bigbatch.batch_size = 100000;
  bigbatch.max_epochs = 3;
  const CalibrationResult bres = tune(big, data, bigbatch);
  CHECK(bres.history.size() == 4);
}

TEST_CASE("tune stops early once validation stalls") {
  const auto data = fixtures::separable_instances(2, 6);
  GbmModel model = fixtures::small_model(data);

  CalibrationConfig cfg;
  cfg.learning_rate = 1e-9;  // effectively frozen, accuracy never improves
  cfg.max_epochs = 200;
  cfg.patience = 4;
  cfg.seed = 2;
  const CalibrationResult res = tune(model, data, cfg);
  CHECK(res.history.size() < 200);
  CHECK(res.history.back().epoch - res.selected_epoch >= 4);
}

TEST_CASE("tuning a degraded model recovers validation accuracy") {
  const auto data = fixtures::separable_instances(3, 8);
  GbmModel model = fixtures::small_model(data);
  std::mt19937 rng(57);
  fixtures::jitter_weights(model, rng, 0.6);

  CalibrationConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.batch_size = 32;
  cfg.max_epochs = 60;
  cfg.validation_fraction = 0.25;
  cfg.patience = 0;
  cfg.seed = 8;

  GbmModel tuned = model;
  const CalibrationResult res = tune(tuned, data, cfg);
  const double before = res.history.front().val_accuracy;
  double selected = 0.0;
  for (const EpochStat& e : res.history) {
    if (e.epoch == res.selected_epoch) selected = e.val_accuracy;
  }
  CHECK(selected >= before);
  CHECK(accuracy(tuned, data) >= accuracy(model, data) - 0.02);
}

TEST_CASE("history CSV layout") {
  CalibrationResult res;
  res.history = {{0, 0.5, 0.25}, {1, 0.375, 0.5}, {2, 0.25, 1.0}};
  res.selected_epoch = 2;
  const auto path = std::filesystem::temp_directory_path() / "actiboost_history.csv";
  write_history_csv(res, path.string());

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "epoch,train_loss,val_accuracy");
  int rows = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    if (!line.empty()) {
      ++rows;
      seen.push_back(line);
    }
  }
  CHECK(rows == 3);
  CHECK(seen[0].rfind("0,0.5,0.25", 0) == 0);
  std::filesystem::remove(path);
}
