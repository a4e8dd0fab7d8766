#pragma once

#include <string>
#include <vector>

#include "actiboost/exec.hpp"
#include "actiboost/types.hpp"

namespace actiboost {

struct WindowSpec {
  int window_len = 25;  // samples per window, one second of data; no overlap
};

// View into one window of a segment.
struct RawWindow {
  const RecordingSegment* segment = nullptr;
  int begin = 0;
  int len = 0;
};

// floor(len / window_len) non-overlapping windows; the trailing remainder is
// discarded. A segment shorter than one window yields an empty list.
std::vector<RawWindow> windowize(const RecordingSegment& segment, WindowSpec spec);

// The six per-axis statistics in feature order. Population (1/N) moments.
// A constant window yields std = skewness = autocorr = range = 0.
struct AxisStats {
  double mean = 0.0;
  double stddev = 0.0;
  double skewness = 0.0;
  double autocorr = 0.0;  // Pearson correlation with the series shifted by one
  double range = 0.0;
  double rms = 0.0;
};

AxisStats axis_statistics(const double* samples, int n);

FeatureInstance extract_features(const RawWindow& window);

// Whole-dataset extraction in segment-then-window order. The OpenMP kernel
// and the serial reference produce identical output.
std::vector<FeatureInstance> extract_instances(const std::vector<RecordingSegment>& segments,
                                               WindowSpec spec, Exec exec = Exec::parallel);
std::vector<FeatureInstance> extract_instances_ref(const std::vector<RecordingSegment>& segments,
                                                   WindowSpec spec);

// Column names for the 18 features, axis-major: ax_mean, ax_std, ...
std::vector<std::string> feature_names();

// CSV with header subject,label,<18 feature columns>. Values are written with
// enough digits to round-trip exactly.
void write_feature_csv(const std::vector<FeatureInstance>& instances, const std::string& path);
std::vector<FeatureInstance> read_feature_csv(const std::string& path);

}  // namespace actiboost
