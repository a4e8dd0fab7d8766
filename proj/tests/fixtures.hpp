#pragma once

// Shared synthetic fixtures for the test binaries. Everything is seeded, so
// the suites are deterministic end to end.

#include <random>
#include <vector>

#include "actiboost/features.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/ingest.hpp"

namespace fixtures {

using namespace actiboost;

// Three well-separated classes; baseline CV should be near-perfect.
inline SynthSpec separable_spec(int subjects = 3, int segments = 12) {
  SynthSpec spec;
  spec.classes = {{Activity::bike, 2.5, 4.0, 0.4, 0.0},
                  {Activity::rest, 0.3, 0.4, 0.05, 0.0},
                  {Activity::walk, 1.2, 1.6, 0.2, 0.0}};
  spec.subjects = subjects;
  spec.segments_per_class = segments;
  spec.samples_per_segment = 125;
  spec.sample_rate_hz = 25.0;
  spec.subject_scale_step = 0.03;
  return spec;
}

inline std::vector<FeatureInstance> separable_instances(int subjects = 3, int segments = 12,
                                                        std::uint32_t seed = 11) {
  return extract_instances(synth_generate(separable_spec(subjects, segments), seed),
                           WindowSpec{25}, Exec::serial);
}

// Uniform-random instances for oracle tests; labels cycle through the first
// n_classes activities so every class is populated.
inline std::vector<FeatureInstance> random_instances(std::mt19937& rng, int n, int n_classes,
                                                     int subjects = 1) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<FeatureInstance> out(n);
  for (int i = 0; i < n; ++i) {
    out[i].subject_id = 1 + i % subjects;
    out[i].label = static_cast<Activity>(i % n_classes);
    for (double& v : out[i].x) v = unit(rng);
  }
  return out;
}

inline GbmModel small_model(const std::vector<FeatureInstance>& instances, int rounds = 10,
                            std::uint32_t seed = 3) {
  TrainConfig cfg;
  cfg.n_rounds = rounds;
  cfg.max_depth = 2;
  cfg.min_samples_leaf = 2;
  cfg.seed = seed;
  return train(instances, cfg, nullptr, Exec::serial);
}

// Randomizes the weight matrix so gradients are taken at a generic point
// rather than the constant-shrinkage initialization.
inline void jitter_weights(GbmModel& model, std::mt19937& rng, double spread = 0.2) {
  std::uniform_real_distribution<double> unit(-spread, spread);
  for (double& w : model.weights) w += unit(rng);
}

}  // namespace fixtures
