#include "actiboost/features.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "actiboost/errors.hpp"

namespace actiboost {

std::vector<RawWindow> windowize(const RecordingSegment& segment, WindowSpec spec) {
  if (spec.window_len < 2) {
    throw std::invalid_argument("window_len must be at least 2 samples");
  }
  std::vector<RawWindow> windows;
  const int n = static_cast<int>(segment.samples.size());
  const int count = n / spec.window_len;
  windows.reserve(count);
  for (int w = 0; w < count; ++w) {
    windows.push_back({&segment, w * spec.window_len, spec.window_len});
  }
  return windows;
}

AxisStats axis_statistics(const double* samples, int n) {
  AxisStats s;
  double sum = 0.0, sum_sq = 0.0;
  double lo = samples[0], hi = samples[0];
  for (int i = 0; i < n; ++i) {
    const double v = samples[i];
    sum += v;
    sum_sq += v * v;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  s.mean = sum / n;
  s.range = hi - lo;
  s.rms = std::sqrt(sum_sq / n);

  if (s.range == 0.0) {
    // Constant window: zero variance by definition, and the moment ratios
    // are pinned to 0 instead of propagating NaN.
    return s;
  }

  double m2 = 0.0, m3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = samples[i] - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= n;
  m3 /= n;
  s.stddev = std::sqrt(m2);
  s.skewness = m2 > 0.0 ? m3 / (s.stddev * s.stddev * s.stddev) : 0.0;

  // Pearson correlation between x[0..n-2] and x[1..n-1].
  const int m = n - 1;
  double mean_a = 0.0, mean_b = 0.0;
  for (int i = 0; i < m; ++i) {
    mean_a += samples[i];
    mean_b += samples[i + 1];
  }
  mean_a /= m;
  mean_b /= m;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (int i = 0; i < m; ++i) {
    const double da = samples[i] - mean_a;
    const double db = samples[i + 1] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  s.autocorr = (var_a > 0.0 && var_b > 0.0) ? cov / std::sqrt(var_a * var_b) : 0.0;
  return s;
}

FeatureInstance extract_features(const RawWindow& window) {
  if (window.segment == nullptr || window.len < 2 ||
      window.begin + window.len > static_cast<int>(window.segment->samples.size())) {
    throw std::invalid_argument("malformed window");
  }
  std::vector<double> axis(window.len);
  FeatureInstance inst;
  inst.subject_id = window.segment->subject_id;
  inst.label = window.segment->activity.activity;
  for (int a = 0; a < 3; ++a) {
    for (int i = 0; i < window.len; ++i) {
      const SampleFrame& f = window.segment->samples[window.begin + i];
      const double v = a == 0 ? f.ax : (a == 1 ? f.ay : f.az);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("non-finite sample in window");
      }
      axis[i] = v;
    }
    const AxisStats s = axis_statistics(axis.data(), window.len);
    const int base = a * 6;
    inst.x[base + 0] = s.mean;
    inst.x[base + 1] = s.stddev;
    inst.x[base + 2] = s.skewness;
    inst.x[base + 3] = s.autocorr;
    inst.x[base + 4] = s.range;
    inst.x[base + 5] = s.rms;
  }
  return inst;
}

namespace {

std::vector<FeatureInstance> extract_impl(const std::vector<RecordingSegment>& segments,
                                          WindowSpec spec, bool parallel) {
  // Flatten (segment, window) pairs so the loop below is a plain index loop.
  std::vector<RawWindow> windows;
  for (const RecordingSegment& seg : segments) {
    auto w = windowize(seg, spec);
    windows.insert(windows.end(), w.begin(), w.end());
  }
  std::vector<FeatureInstance> out(windows.size());
  const long n = static_cast<long>(windows.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      out[i] = extract_features(windows[i]);
    }
  } else {
    for (long i = 0; i < n; ++i) {
      out[i] = extract_features(windows[i]);
    }
  }
  return out;
}

}  // namespace

std::vector<FeatureInstance> extract_instances(const std::vector<RecordingSegment>& segments,
                                               WindowSpec spec, Exec exec) {
  return extract_impl(segments, spec, exec == Exec::parallel);
}

std::vector<FeatureInstance> extract_instances_ref(const std::vector<RecordingSegment>& segments,
                                                   WindowSpec spec) {
  return extract_impl(segments, spec, false);
}

std::vector<std::string> feature_names() {
  static const char* axes[] = {"ax", "ay", "az"};
  static const char* stats[] = {"mean", "std", "skewness", "autocorr", "range", "rms"};
  std::vector<std::string> names;
  names.reserve(kFeatureCount);
  for (const char* axis : axes) {
    for (const char* stat : stats) {
      names.push_back(std::string(axis) + "_" + stat);
    }
  }
  return names;
}

void write_feature_csv(const std::vector<FeatureInstance>& instances, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw data_error("cannot open feature file for writing: " + path);
  }
  out << "subject,label";
  for (const std::string& name : feature_names()) {
    out << ',' << name;
  }
  out << '\n';
  char buf[40];
  for (const FeatureInstance& inst : instances) {
    out << inst.subject_id << ',' << to_string(inst.label);
    for (double v : inst.x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  if (!out) {
    throw data_error("write failed: " + path);
  }
}

std::vector<FeatureInstance> read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw data_error("cannot open feature file: " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw data_error(path + ": empty feature file");
  }
  std::vector<FeatureInstance> instances;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) {
      cells.push_back(cell);
    }
    if (cells.size() != 2 + kFeatureCount) {
      throw data_error(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(2 + kFeatureCount) + " columns, got " +
                       std::to_string(cells.size()));
    }
    FeatureInstance inst;
    try {
      inst.subject_id = std::stoi(cells[0]);
      inst.label = activity_from_string(cells[1]);
      for (int i = 0; i < kFeatureCount; ++i) {
        inst.x[i] = std::stod(cells[2 + i]);
        if (!std::isfinite(inst.x[i])) {
          throw std::invalid_argument("non-finite feature");
        }
      }
    } catch (const config_error& e) {
      throw data_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw data_error(path + ":" + std::to_string(line_no) + ": bad value (" + e.what() + ")");
    }
    instances.push_back(inst);
  }
  return instances;
}

}  // namespace actiboost
