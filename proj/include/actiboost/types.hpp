#pragma once

#include <array>
#include <string>
#include <vector>

namespace actiboost {

enum class Activity : int { bike = 0, rest = 1, run = 2, walk = 3 };

const char* to_string(Activity a);
Activity activity_from_string(const std::string& name);  // throws config_error

// Class label as emitted by a parser: the mapped class plus the dataset-native
// code (directory number for Dataset I, activity id for Dataset II, class index
// for synthetic data).
struct ActivityLabel {
  Activity activity = Activity::rest;
  int raw_code = -1;
};

// One timestamped triaxial accelerometer reading.
struct SampleFrame {
  int subject_id = 0;
  ActivityLabel activity;
  int t_index = 0;  // sample index within the segment, strictly increasing
  double ax = 0.0, ay = 0.0, az = 0.0;
};

// A contiguous single-subject, single-activity recording.
struct RecordingSegment {
  int subject_id = 0;
  ActivityLabel activity;
  double sample_rate_hz = 0.0;
  std::vector<SampleFrame> samples;
};

inline constexpr int kFeatureCount = 18;  // 6 statistics x 3 axes

// The unit of training and evaluation: 18 features, axis-major, each axis
// ordered [mean, std, skewness, autocorr, range, rms].
struct FeatureInstance {
  int subject_id = 0;
  Activity label = Activity::rest;
  std::array<double, kFeatureCount> x{};
};

}  // namespace actiboost
