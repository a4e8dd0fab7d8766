#include <cmath>
#include <random>
#include <stdexcept>

#include "actiboost/ingest.hpp"

namespace actiboost {

namespace {

constexpr double kTau = 6.283185307179586;

}  // namespace

std::vector<RecordingSegment> synth_generate(const SynthSpec& spec, std::uint32_t seed) {
  if (spec.classes.empty() || spec.subjects <= 0 || spec.segments_per_class <= 0 ||
      spec.samples_per_segment <= 0 || spec.sample_rate_hz <= 0.0) {
    throw std::invalid_argument("synth spec requires positive counts and sample rate");
  }

  // One RNG drives the whole generation in a fixed nesting order, so a seed
  // pins every byte of the output.
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, kTau);

  std::vector<RecordingSegment> segments;
  segments.reserve(static_cast<size_t>(spec.subjects) * spec.classes.size() *
                   spec.segments_per_class);

  for (int s = 0; s < spec.subjects; ++s) {
    const int subject_id = spec.first_subject_id + s;
    const double subject_scale = 1.0 + spec.subject_scale_step * s;
    for (size_t c = 0; c < spec.classes.size(); ++c) {
      const SynthClassSpec& cls = spec.classes[c];
      const double amplitude = cls.amplitude * subject_scale * spec.amplitude_scale;
      const double noise = cls.noise_std * subject_scale * spec.amplitude_scale;
      for (int k = 0; k < spec.segments_per_class; ++k) {
        RecordingSegment seg;
        seg.subject_id = subject_id;
        seg.activity = ActivityLabel{cls.activity, static_cast<int>(c)};
        seg.sample_rate_hz = spec.sample_rate_hz;
        seg.samples.reserve(spec.samples_per_segment);
        const double phi = phase(rng);
        for (int t = 0; t < spec.samples_per_segment; ++t) {
          const double arg = kTau * cls.freq_hz * t / spec.sample_rate_hz + phi;
          SampleFrame f;
          f.subject_id = subject_id;
          f.activity = seg.activity;
          f.t_index = t;
          f.ax = cls.baseline + amplitude * std::sin(arg) + noise * gauss(rng);
          f.ay = cls.baseline + amplitude * std::sin(arg + kTau / 3.0) + noise * gauss(rng);
          f.az = cls.baseline + 0.5 * amplitude * std::cos(arg) + noise * gauss(rng);
          seg.samples.push_back(f);
        }
        segments.push_back(std::move(seg));
      }
    }
  }
  return segments;
}

}  // namespace actiboost
