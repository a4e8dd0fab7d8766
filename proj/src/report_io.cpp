#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "actiboost/errors.hpp"
#include "actiboost/evaluate.hpp"

namespace actiboost {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kReportFormatVersion = 1;

json roc_to_json(const std::vector<RocPoint>& roc) {
  json arr = json::array();
  for (const RocPoint& pt : roc) arr.push_back({pt.fpr, pt.tpr});
  return arr;
}

std::vector<RocPoint> roc_from_json(const json& arr) {
  std::vector<RocPoint> roc;
  for (const json& pt : arr) roc.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
  return roc;
}

json summary_to_json(const EvalSummary& s, const std::vector<std::string>& class_names) {
  json per_class = json::array();
  for (std::size_t c = 0; c < s.per_class.size(); ++c) {
    const ClassMetrics& cm = s.per_class[c];
    json entry{{"class", class_names[c]},   {"accuracy", cm.accuracy},
               {"precision", cm.precision}, {"f1", cm.f1},
               {"auc", cm.auc},             {"support", cm.support}};
    if (!cm.roc.empty()) entry["roc"] = roc_to_json(cm.roc);
    per_class.push_back(std::move(entry));
  }
  return json{{"accuracy", s.accuracy}, {"macro_f1", s.macro_f1}, {"per_class", per_class}};
}

EvalSummary summary_from_json(const json& doc) {
  EvalSummary s;
  s.accuracy = doc.at("accuracy").get<double>();
  s.macro_f1 = doc.at("macro_f1").get<double>();
  for (const json& entry : doc.at("per_class")) {
    ClassMetrics cm;
    cm.accuracy = entry.at("accuracy").get<double>();
    cm.precision = entry.at("precision").get<double>();
    cm.f1 = entry.at("f1").get<double>();
    cm.auc = entry.at("auc").get<double>();
    cm.support = entry.at("support").get<long>();
    if (entry.contains("roc")) cm.roc = roc_from_json(entry.at("roc"));
    s.per_class.push_back(std::move(cm));
  }
  return s;
}

json tuned_to_json(const TunedEval& t, const std::vector<std::string>& class_names) {
  return json{{"mean", summary_to_json(t.mean, class_names)},
              {"macro_f1_std", t.macro_f1_std}};
}

TunedEval tuned_from_json(const json& doc) {
  TunedEval t;
  t.mean = summary_from_json(doc.at("mean"));
  t.macro_f1_std = doc.at("macro_f1_std").get<double>();
  return t;
}

double subject_mean_macro_f1(const std::map<int, EvalSummary>& by_subject) {
  double sum = 0.0;
  for (const auto& [subject, summary] : by_subject) sum += summary.macro_f1;
  return sum / static_cast<double>(by_subject.size());
}

double subject_mean_macro_f1_tuned(const std::map<int, TunedEval>& by_subject) {
  double sum = 0.0;
  for (const auto& [subject, eval] : by_subject) sum += eval.mean.macro_f1;
  return sum / static_cast<double>(by_subject.size());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw data_error("failed writing: " + path.string());
}

std::string format_row(const char* fmt, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

void write_roc_csv(const fs::path& dir, int subject, const std::string& class_name,
                   const std::vector<RocPoint>& baseline, const std::vector<RocPoint>& tuned) {
  std::string text = "model,fpr,tpr\n";
  char buf[96];
  for (const RocPoint& pt : baseline) {
    std::snprintf(buf, sizeof buf, "baseline,%.17g,%.17g\n", pt.fpr, pt.tpr);
    text += buf;
  }
  for (const RocPoint& pt : tuned) {
    std::snprintf(buf, sizeof buf, "tuned,%.17g,%.17g\n", pt.fpr, pt.tpr);
    text += buf;
  }
  write_text(dir / (std::to_string(subject) + "_" + class_name + ".csv"), text);
}

}  // namespace

void emit_report(const CvReport& report, const std::string& out_dir, bool roc_csv) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  json doc;
  doc["format"] = "actiboost-report";
  doc["version"] = kReportFormatVersion;
  doc["config_hash"] = report.config_hash;
  doc["class_names"] = report.class_names;
  doc["subjects"] = report.subjects;
  doc["repetitions"] = report.tuned.repetitions;
  doc["skipped_subjects"] = report.tuned.skipped_subjects;

  json baseline_subjects = json::object();
  for (const auto& [subject, summary] : report.baseline.by_subject) {
    baseline_subjects[std::to_string(subject)] = summary_to_json(summary, report.class_names);
  }
  doc["baseline"] = {{"by_subject", baseline_subjects},
                     {"pooled", summary_to_json(report.baseline.pooled, report.class_names)}};

  json tuned_subjects = json::object();
  for (const auto& [subject, eval] : report.tuned.by_subject) {
    tuned_subjects[std::to_string(subject)] = tuned_to_json(eval, report.class_names);
  }
  doc["tuned"] = {{"by_subject", tuned_subjects},
                  {"pooled", tuned_to_json(report.tuned.pooled, report.class_names)}};

  doc["overall"] = {
      {"baseline_macro_f1_pooled", report.baseline.pooled.macro_f1},
      {"baseline_macro_f1_subject_mean", subject_mean_macro_f1(report.baseline.by_subject)},
      {"tuned_macro_f1_pooled", report.tuned.pooled.mean.macro_f1},
      {"tuned_macro_f1_subject_mean", subject_mean_macro_f1_tuned(report.tuned.by_subject)},
      {"tuned_macro_f1_pooled_std", report.tuned.pooled.macro_f1_std},
  };

  write_text(dir / "report.json", doc.dump(2) + "\n");

  // Per-subject macro-F1 table, Overall row last (pooled values).
  std::string f1_table = "subject,baseline_f1,tuned_f1,tuned_f1_std\n";
  for (const auto& [subject, summary] : report.baseline.by_subject) {
    const auto it = report.tuned.by_subject.find(subject);
    if (it == report.tuned.by_subject.end()) continue;
    f1_table += std::to_string(subject) + "," +
                format_row("%.6f,%.6f,%.6f\n", summary.macro_f1, it->second.mean.macro_f1,
                           it->second.macro_f1_std);
  }
  f1_table += "Overall," + format_row("%.6f,%.6f,%.6f\n", report.baseline.pooled.macro_f1,
                                      report.tuned.pooled.mean.macro_f1,
                                      report.tuned.pooled.macro_f1_std);
  write_text(dir / "f1_table.csv", f1_table);

  // Pooled per-class accuracy, baseline vs tuned.
  std::string class_table = "class,baseline_accuracy,tuned_accuracy\n";
  for (std::size_t c = 0; c < report.class_names.size(); ++c) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f\n", report.class_names[c].c_str(),
                  report.baseline.pooled.per_class[c].accuracy,
                  report.tuned.pooled.mean.per_class[c].accuracy);
    class_table += buf;
  }
  write_text(dir / "class_accuracy.csv", class_table);

  if (roc_csv) {
    const fs::path roc_dir = dir / "roc";
    fs::create_directories(roc_dir);
    for (const auto& [subject, summary] : report.baseline.by_subject) {
      const auto it = report.tuned.by_subject.find(subject);
      if (it == report.tuned.by_subject.end()) continue;
      for (std::size_t c = 0; c < report.class_names.size(); ++c) {
        write_roc_csv(roc_dir, subject, report.class_names[c], summary.per_class[c].roc,
                      it->second.mean.per_class[c].roc);
      }
    }
  }
}

CvReport load_report(const std::string& json_path) {
  std::ifstream in(json_path, std::ios::binary);
  if (!in) throw data_error("cannot open report file: " + json_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("report: invalid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "actiboost-report") {
      throw data_error("report: unrecognized format tag");
    }
    if (doc.at("version").get<int>() != kReportFormatVersion) {
      throw data_error("report: unsupported version");
    }
    CvReport report;
    report.config_hash = doc.at("config_hash").get<std::string>();
    report.class_names = doc.at("class_names").get<std::vector<std::string>>();
    report.subjects = doc.at("subjects").get<std::vector<int>>();
    report.tuned.repetitions = doc.at("repetitions").get<int>();
    report.tuned.skipped_subjects = doc.at("skipped_subjects").get<std::vector<int>>();
    for (const auto& [key, value] : doc.at("baseline").at("by_subject").items()) {
      report.baseline.by_subject.emplace(std::stoi(key), summary_from_json(value));
    }
    report.baseline.pooled = summary_from_json(doc.at("baseline").at("pooled"));
    for (const auto& [key, value] : doc.at("tuned").at("by_subject").items()) {
      report.tuned.by_subject.emplace(std::stoi(key), tuned_from_json(value));
    }
    report.tuned.pooled = tuned_from_json(doc.at("tuned").at("pooled"));
    return report;
  } catch (const json::exception& e) {
    throw data_error(std::string("report: malformed document: ") + e.what());
  }
}

}  // namespace actiboost
