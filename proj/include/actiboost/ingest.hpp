#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "actiboost/types.hpp"

namespace actiboost {

enum class NanPolicy { drop, interpolate };

NanPolicy nan_policy_from_string(const std::string& name);
const char* to_string(NanPolicy policy);

struct IngestConfig {
  std::string root;

  // Dataset I: which sensor unit's accelerometer columns to read and which
  // activity directory feeds each class.
  std::string dsads_unit = "right_arm";
  std::map<Activity, std::string> dsads_activities = default_dsads_activities();

  // Dataset II: raw activity id per class and the subjects to load. An empty
  // subject list means: scan the directory and keep every subject that has
  // data for all mapped classes, logging the exclusions.
  std::map<Activity, int> pamap_activities = default_pamap_activities();
  std::vector<int> pamap_subjects;
  NanPolicy nan_policy = NanPolicy::interpolate;
  int max_interp_gap = 3;  // samples; under the interpolate policy, longer
                           // gaps are dropped and the segment splits there

  static std::map<Activity, std::string> default_dsads_activities();
  static std::map<Activity, int> default_pamap_activities();
};

// Parse a Daily and Sports Activities tree. One RecordingSegment per
// (subject, mapped activity, segment file), in sorted-path order.
std::vector<RecordingSegment> parse_dsads(const std::string& root_path,
                                          const IngestConfig& config);

// Parse PAMAP2 Protocol files. Segments split at activity transitions and,
// under the interpolate policy, at dropped gaps longer than max_interp_gap.
std::vector<RecordingSegment> parse_pamap2(const std::string& root_path,
                                           const IngestConfig& config);

// One synthetic class: a noisy sinusoid per axis.
struct SynthClassSpec {
  Activity activity = Activity::rest;
  double freq_hz = 1.0;
  double amplitude = 1.0;
  double noise_std = 0.1;
  double baseline = 0.0;  // constant offset shared by all three axes
};

struct SynthSpec {
  std::vector<SynthClassSpec> classes;
  int subjects = 2;
  int segments_per_class = 4;  // per subject
  int samples_per_segment = 125;
  double sample_rate_hz = 25.0;
  int first_subject_id = 1;
  double subject_scale_step = 0.0;  // subject k scales amplitudes by 1 + k*step
  double amplitude_scale = 1.0;     // global multiplier, used by drift fixtures
};

// Deterministic for a fixed seed; bitwise-identical segments across runs.
std::vector<RecordingSegment> synth_generate(const SynthSpec& spec, std::uint32_t seed);

}  // namespace actiboost
