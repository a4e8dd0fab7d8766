#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>

#include "actiboost/dataset_layout.hpp"
#include "actiboost/errors.hpp"
#include "actiboost/ingest.hpp"

namespace fs = std::filesystem;

namespace actiboost {

std::map<Activity, std::string> IngestConfig::default_dsads_activities() {
  // Directory picks among the 19 recorded activities: lying on the back for
  // rest, walking in a parking lot, treadmill running at 8 km/h, and the
  // exercise bike in vertical position. All overridable.
  return {{Activity::rest, "a03"},
          {Activity::walk, "a09"},
          {Activity::run, "a12"},
          {Activity::bike, "a16"}};
}

namespace {

struct SegmentFile {
  fs::path path;
  int subject_id;
  ActivityLabel label;
};

double parse_strict_double(const std::string& cell, const fs::path& file, long line_no) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v)) {
    throw data_error(file.string() + ":" + std::to_string(line_no) + ": unparseable number '" +
                     cell + "'");
  }
  return v;
}

RecordingSegment parse_segment_file(const SegmentFile& sf, int acc_col) {
  std::ifstream in(sf.path);
  if (!in) {
    throw data_error("cannot open segment file: " + sf.path.string());
  }
  RecordingSegment seg;
  seg.subject_id = sf.subject_id;
  seg.activity = sf.label;
  seg.sample_rate_hz = layout::kDsadsSampleRateHz;
  seg.samples.reserve(layout::kDsadsRowsPerFile);

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.eof()) break;
    std::vector<std::string> cells;
    cells.reserve(layout::kDsadsColumns);
    size_t start = 0;
    while (start <= line.size()) {
      const size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(start));
        break;
      }
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (static_cast<int>(cells.size()) != layout::kDsadsColumns) {
      throw data_error(sf.path.string() + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(layout::kDsadsColumns) + " columns, got " +
                       std::to_string(cells.size()));
    }
    SampleFrame frame;
    frame.subject_id = sf.subject_id;
    frame.activity = sf.label;
    frame.t_index = static_cast<int>(line_no - 1);
    frame.ax = parse_strict_double(cells[acc_col], sf.path, line_no);
    frame.ay = parse_strict_double(cells[acc_col + 1], sf.path, line_no);
    frame.az = parse_strict_double(cells[acc_col + 2], sf.path, line_no);
    seg.samples.push_back(frame);
  }
  if (static_cast<int>(seg.samples.size()) != layout::kDsadsRowsPerFile) {
    throw data_error(sf.path.string() + ": expected " +
                     std::to_string(layout::kDsadsRowsPerFile) + " rows, got " +
                     std::to_string(seg.samples.size()));
  }
  return seg;
}

int subject_number(const std::string& dir_name) {
  // Subject directories are p1..p8.
  if (dir_name.size() < 2 || dir_name[0] != 'p') return -1;
  for (size_t i = 1; i < dir_name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(dir_name[i]))) return -1;
  }
  return std::atoi(dir_name.c_str() + 1);
}

int activity_number(const std::string& dir_name) {
  // Activity directories are a01..a19.
  if (dir_name.size() < 2 || dir_name[0] != 'a') return -1;
  for (size_t i = 1; i < dir_name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(dir_name[i]))) return -1;
  }
  return std::atoi(dir_name.c_str() + 1);
}

}  // namespace

std::vector<RecordingSegment> parse_dsads(const std::string& root_path,
                                          const IngestConfig& config) {
  const fs::path root(root_path);
  if (!fs::is_directory(root)) {
    throw data_error("dataset root is not a directory: " + root_path);
  }
  const int acc_col = layout::dsads_unit_acc_column(config.dsads_unit);

  std::map<std::string, Activity> dir_to_activity;
  for (const auto& [activity, dir] : config.dsads_activities) {
    dir_to_activity[dir] = activity;
  }

  // Sorted walk: activity dir, then subject dir, then segment file.
  std::vector<SegmentFile> files;
  std::vector<fs::path> activity_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) activity_dirs.push_back(entry.path());
  }
  std::sort(activity_dirs.begin(), activity_dirs.end());
  for (const fs::path& adir : activity_dirs) {
    const auto it = dir_to_activity.find(adir.filename().string());
    if (it == dir_to_activity.end()) continue;
    const ActivityLabel label{it->second, activity_number(adir.filename().string())};
    std::vector<fs::path> subject_dirs;
    for (const auto& entry : fs::directory_iterator(adir)) {
      if (entry.is_directory()) subject_dirs.push_back(entry.path());
    }
    std::sort(subject_dirs.begin(), subject_dirs.end());
    for (const fs::path& sdir : subject_dirs) {
      const int subject = subject_number(sdir.filename().string());
      if (subject < 0) continue;
      std::vector<fs::path> seg_files;
      for (const auto& entry : fs::directory_iterator(sdir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
          seg_files.push_back(entry.path());
        }
      }
      std::sort(seg_files.begin(), seg_files.end());
      for (const fs::path& f : seg_files) {
        files.push_back({f, subject, label});
      }
    }
  }

  // Files are independent; parse in parallel into per-file slots and report
  // the first failure in sorted-path order.
  std::vector<RecordingSegment> segments(files.size());
  std::vector<std::exception_ptr> errors(files.size());
  const long n = static_cast<long>(files.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      segments[i] = parse_segment_file(files[i], acc_col);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (long i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  return segments;
}

}  // namespace actiboost
