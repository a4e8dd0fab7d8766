#include <benchmark/benchmark.h>

#include <numeric>

#include "actiboost/calibrate.hpp"
#include "actiboost/features.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/ingest.hpp"
#include "actiboost/tree_build.hpp"

using namespace actiboost;

namespace {

SynthSpec bench_spec() {
  SynthSpec spec;
  spec.classes = {{Activity::bike, 2.5, 4.0, 0.4, 0.0},
                  {Activity::rest, 0.3, 0.4, 0.05, 0.0},
                  {Activity::walk, 1.2, 1.6, 0.2, 0.0}};
  spec.subjects = 4;
  spec.segments_per_class = 40;
  spec.samples_per_segment = 250;
  spec.sample_rate_hz = 25.0;
  spec.subject_scale_step = 0.03;
  return spec;
}

const std::vector<RecordingSegment>& segments() {
  static const std::vector<RecordingSegment> s = synth_generate(bench_spec(), 7);
  return s;
}

const std::vector<FeatureInstance>& instances() {
  static const std::vector<FeatureInstance> inst =
      extract_instances(segments(), WindowSpec{25}, Exec::serial);
  return inst;
}

const GbmModel& model() {
  static const GbmModel m = [] {
    TrainConfig cfg;
    cfg.n_rounds = 40;
    return train(instances(), cfg, nullptr, Exec::serial);
  }();
  return m;
}

void BM_extract(benchmark::State& state, Exec exec) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_instances(segments(), WindowSpec{25}, exec));
  }
}

void BM_batch_scores(benchmark::State& state, Exec exec) {
  const GbmModel& m = model();  // materialize outside the timed loop
  const std::vector<FeatureInstance>& data = instances();
  for (auto _ : state) {
    benchmark::DoNotOptimize(batch_scores(m, data, exec));
  }
}

void BM_gradient(benchmark::State& state, Exec exec) {
  const GbmModel& m = model();
  const std::vector<FeatureInstance>& data = instances();
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient(m, data, GradientMode::full_jacobian, exec));
  }
}

void BM_best_split(benchmark::State& state, Exec exec) {
  const std::vector<FeatureInstance>& data = instances();
  std::vector<int> idx(data.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> target(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) target[i] = data[i].x[0] - data[i].x[3];
  for (auto _ : state) {
    benchmark::DoNotOptimize(tree_build::best_split(data, idx, target, 5, exec));
  }
}

void BM_train(benchmark::State& state, Exec exec) {
  TrainConfig cfg;
  cfg.n_rounds = 10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(train(instances(), cfg, nullptr, exec));
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_extract, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_extract, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_batch_scores, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_batch_scores, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_gradient, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_gradient, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_best_split, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_best_split, parallel, Exec::parallel);
BENCHMARK_CAPTURE(BM_train, serial, Exec::serial);
BENCHMARK_CAPTURE(BM_train, parallel, Exec::parallel);

BENCHMARK_MAIN();
