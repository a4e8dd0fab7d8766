#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "actiboost/dataset_layout.hpp"
#include "actiboost/errors.hpp"
#include "actiboost/ingest.hpp"

namespace fs = std::filesystem;

namespace actiboost {

std::map<Activity, int> IngestConfig::default_pamap_activities() {
  // Raw ids: 1 = lying (the default rest posture; 2 = sitting is the common
  // override), 4 = walking, 6 = cycling.
  return {{Activity::rest, 1}, {Activity::walk, 4}, {Activity::bike, 6}};
}

NanPolicy nan_policy_from_string(const std::string& name) {
  if (name == "drop") return NanPolicy::drop;
  if (name == "interpolate") return NanPolicy::interpolate;
  throw config_error("unknown NaN policy '" + name + "' (expected drop or interpolate)");
}

const char* to_string(NanPolicy policy) {
  return policy == NanPolicy::drop ? "drop" : "interpolate";
}

namespace {

struct RawRow {
  double ax = 0.0, ay = 0.0, az = 0.0;
  bool missing = false;
};

// One maximal run of rows sharing a mapped activity.
struct ActivityRun {
  ActivityLabel label;
  std::vector<RawRow> rows;
};

double parse_pamap_cell(const std::string& cell, const fs::path& file, long line_no,
                        bool* missing) {
  if (cell == "NaN" || cell == "nan") {
    *missing = true;
    return std::numeric_limits<double>::quiet_NaN();
  }
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v)) {
    throw data_error(file.string() + ":" + std::to_string(line_no) + ": unparseable number '" +
                     cell + "'");
  }
  return v;
}

std::vector<ActivityRun> read_activity_runs(const fs::path& file,
                                            const std::map<int, Activity>& id_to_activity) {
  std::ifstream in(file);
  if (!in) {
    throw data_error("cannot open subject file: " + file.string());
  }
  std::vector<ActivityRun> runs;
  const Activity kNone = static_cast<Activity>(-1);
  Activity current = kNone;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::string> cells;
    cells.reserve(layout::kPamapColumns);
    std::string cell;
    while (row >> cell) {
      cells.push_back(cell);
    }
    if (static_cast<int>(cells.size()) != layout::kPamapColumns) {
      throw data_error(file.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(layout::kPamapColumns) + " columns, got " +
                       std::to_string(cells.size()));
    }
    bool id_missing = false;
    const double raw_id =
        parse_pamap_cell(cells[layout::kPamapActivityColumn], file, line_no, &id_missing);
    if (id_missing) {
      throw data_error(file.string() + ":" + std::to_string(line_no) + ": missing activity id");
    }
    const int activity_id = static_cast<int>(raw_id);
    const auto it = id_to_activity.find(activity_id);
    if (it == id_to_activity.end()) {
      current = kNone;  // unmapped activity breaks any open run
      continue;
    }
    if (it->second != current) {
      runs.push_back({ActivityLabel{it->second, activity_id}, {}});
      current = it->second;
    }
    RawRow r;
    r.ax = parse_pamap_cell(cells[layout::kPamapHandAcc16Column], file, line_no, &r.missing);
    r.ay = parse_pamap_cell(cells[layout::kPamapHandAcc16Column + 1], file, line_no, &r.missing);
    r.az = parse_pamap_cell(cells[layout::kPamapHandAcc16Column + 2], file, line_no, &r.missing);
    runs.back().rows.push_back(r);
  }
  return runs;
}

void flush_segment(std::vector<RecordingSegment>& out, int subject, const ActivityLabel& label,
                   const std::vector<std::pair<int, RawRow>>& rows) {
  if (rows.empty()) return;
  RecordingSegment seg;
  seg.subject_id = subject;
  seg.activity = label;
  seg.sample_rate_hz = layout::kPamapSampleRateHz;
  seg.samples.reserve(rows.size());
  for (const auto& [t, r] : rows) {
    SampleFrame f;
    f.subject_id = subject;
    f.activity = label;
    f.t_index = t;
    f.ax = r.ax;
    f.ay = r.ay;
    f.az = r.az;
    seg.samples.push_back(f);
  }
  out.push_back(std::move(seg));
}

// Apply the NaN policy to one activity run and emit segments. t_index keeps
// the row's position within the run, so dropped rows stay visible as index
// gaps under the drop policy.
void emit_run_segments(std::vector<RecordingSegment>& out, int subject, const ActivityRun& run,
                       NanPolicy policy, int max_gap) {
  if (policy == NanPolicy::drop) {
    std::vector<std::pair<int, RawRow>> kept;
    for (int i = 0; i < static_cast<int>(run.rows.size()); ++i) {
      if (!run.rows[i].missing) kept.emplace_back(i, run.rows[i]);
    }
    flush_segment(out, subject, run.label, kept);
    return;
  }

  // Interpolate gaps of at most max_gap samples between valid neighbours;
  // longer gaps and boundary gaps split the run.
  std::vector<std::pair<int, RawRow>> current;
  int prev_valid = -1;
  for (int i = 0; i < static_cast<int>(run.rows.size()); ++i) {
    if (run.rows[i].missing) continue;
    if (prev_valid < 0) {
      current.emplace_back(i, run.rows[i]);
    } else {
      const int gap = i - prev_valid - 1;
      if (gap == 0) {
        current.emplace_back(i, run.rows[i]);
      } else if (gap <= max_gap) {
        const RawRow& a = run.rows[prev_valid];
        const RawRow& b = run.rows[i];
        for (int k = prev_valid + 1; k < i; ++k) {
          const double t = static_cast<double>(k - prev_valid) / (i - prev_valid);
          RawRow filled;
          filled.ax = a.ax + t * (b.ax - a.ax);
          filled.ay = a.ay + t * (b.ay - a.ay);
          filled.az = a.az + t * (b.az - a.az);
          current.emplace_back(k, filled);
        }
        current.emplace_back(i, run.rows[i]);
      } else {
        flush_segment(out, subject, run.label, current);
        current.clear();
        current.emplace_back(i, run.rows[i]);
      }
    }
    prev_valid = i;
  }
  flush_segment(out, subject, run.label, current);
}

std::vector<RecordingSegment> parse_subject_file(const fs::path& file, int subject,
                                                 const IngestConfig& config) {
  std::map<int, Activity> id_to_activity;
  for (const auto& [activity, id] : config.pamap_activities) {
    id_to_activity[id] = activity;
  }
  std::vector<RecordingSegment> out;
  for (const ActivityRun& run : read_activity_runs(file, id_to_activity)) {
    emit_run_segments(out, subject, run, config.nan_policy, config.max_interp_gap);
  }
  return out;
}

int subject_from_filename(const std::string& name) {
  // subjectNNN.dat
  if (name.rfind("subject", 0) != 0) return -1;
  const size_t dot = name.find('.');
  if (dot == std::string::npos || name.substr(dot) != ".dat") return -1;
  const std::string digits = name.substr(7, dot - 7);
  if (digits.empty()) return -1;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
  }
  return std::atoi(digits.c_str());
}

}  // namespace

std::vector<RecordingSegment> parse_pamap2(const std::string& root_path,
                                           const IngestConfig& config) {
  fs::path dir(root_path);
  if (!fs::is_directory(dir)) {
    throw data_error("dataset root is not a directory: " + root_path);
  }
  if (fs::is_directory(dir / "Protocol")) {
    dir /= "Protocol";
  }

  std::vector<std::pair<int, fs::path>> files;
  if (!config.pamap_subjects.empty()) {
    for (int subject : config.pamap_subjects) {
      const fs::path f = dir / ("subject" + std::to_string(subject) + ".dat");
      if (!fs::is_regular_file(f)) {
        throw data_error("configured subject " + std::to_string(subject) +
                         " has no data file: " + f.string());
      }
      files.emplace_back(subject, f);
    }
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (!entry.is_regular_file()) continue;
      const int subject = subject_from_filename(entry.path().filename().string());
      if (subject >= 0) files.emplace_back(subject, entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<RecordingSegment>> per_file(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  const long n = static_cast<long>(files.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      per_file[i] = parse_subject_file(files[i].second, files[i].first, config);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (long i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }

  // With an explicit subject list the caller gets exactly those subjects.
  // Otherwise keep subjects that recorded every mapped class and log the rest.
  std::vector<RecordingSegment> segments;
  if (!config.pamap_subjects.empty()) {
    for (auto& v : per_file) {
      for (auto& s : v) segments.push_back(std::move(s));
    }
    return segments;
  }

  for (size_t i = 0; i < files.size(); ++i) {
    std::set<Activity> seen;
    for (const RecordingSegment& s : per_file[i]) {
      seen.insert(s.activity.activity);
    }
    std::vector<std::string> missing;
    for (const auto& [activity, id] : config.pamap_activities) {
      (void)id;
      if (!seen.count(activity)) missing.push_back(to_string(activity));
    }
    if (missing.empty()) {
      for (auto& s : per_file[i]) segments.push_back(std::move(s));
    } else {
      std::string classes;
      for (const std::string& m : missing) {
        if (!classes.empty()) classes += ", ";
        classes += m;
      }
      std::cerr << "pamap2: excluding subject " << files[i].first << " (no data for: " << classes
                << ")\n";
    }
  }
  return segments;
}

}  // namespace actiboost
