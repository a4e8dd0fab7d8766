#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "actiboost/calibrate.hpp"
#include "actiboost/errors.hpp"
#include "actiboost/evaluate.hpp"
#include "actiboost/exec.hpp"
#include "actiboost/features.hpp"
#include "actiboost/gbm.hpp"
#include "actiboost/gbm_io.hpp"
#include "actiboost/ingest.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace actiboost;

namespace {

struct RunConfig {
  std::string dataset = "synth";
  std::string root;
  std::string out = "out";
  std::uint32_t seed = 42;
  int threads = 0;
  bool serial = false;
  int window = 0;  // samples; 0 picks the dataset's native one-second window
  int repetitions = 5;
  bool roc_csv = false;

  std::string dsads_unit = "right_arm";
  std::string dsads_map = "rest:a03,walk:a09,run:a12,bike:a16";
  std::string pamap_map = "rest:1,walk:4,bike:6";
  std::vector<int> pamap_subjects;
  std::string nan_policy = "interpolate";
  int max_interp_gap = 3;

  TrainConfig train;
  double learning_rate = 0.01;
  int batch_size = 32;
  int max_epochs = 200;
  double validation_fraction = 0.2;
  int patience = 20;
  std::string gradient_mode = "full_jacobian";

  std::string synth_classes = "bike:2.5:4.0:0.4,rest:0.3:0.4:0.05,walk:1.2:1.6:0.2";
  int synth_subjects = 4;
  int synth_segments = 30;
  int synth_samples = 125;
  double synth_rate = 25.0;
  double synth_subject_step = 0.03;
  double synth_amplitude_scale = 1.0;

  std::string features_file;
  std::string model = "";
  std::string model_out = "";
  std::string user_data;
  std::string history = "";
  std::string report_json;
};

std::uint32_t mix(std::uint32_t base, std::uint32_t salt) {
  std::uint64_t h = (static_cast<std::uint64_t>(base) << 32) | salt;
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return static_cast<std::uint32_t>(h);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::map<Activity, std::string> parse_activity_map(const std::string& text) {
  std::map<Activity, std::string> out;
  for (const std::string& pair : split(text, ',')) {
    const auto kv = split(pair, ':');
    if (kv.size() != 2 || kv[0].empty() || kv[1].empty()) {
      throw config_error("bad activity mapping entry: '" + pair + "'");
    }
    out[activity_from_string(kv[0])] = kv[1];
  }
  if (out.empty()) throw config_error("activity mapping is empty");
  return out;
}

std::map<Activity, int> parse_activity_id_map(const std::string& text) {
  std::map<Activity, int> out;
  for (const auto& [activity, value] : parse_activity_map(text)) {
    try {
      out[activity] = std::stoi(value);
    } catch (const std::exception&) {
      throw config_error("bad activity id '" + value + "' for class " + to_string(activity));
    }
  }
  return out;
}

std::vector<SynthClassSpec> parse_synth_classes(const std::string& text) {
  std::vector<SynthClassSpec> classes;
  for (const std::string& entry : split(text, ',')) {
    const auto parts = split(entry, ':');
    if (parts.size() != 4 && parts.size() != 5) {
      throw config_error("bad synth class entry: '" + entry +
                         "' (want name:freq:amplitude:noise[:baseline])");
    }
    SynthClassSpec spec;
    try {
      spec.activity = activity_from_string(parts[0]);
      spec.freq_hz = std::stod(parts[1]);
      spec.amplitude = std::stod(parts[2]);
      spec.noise_std = std::stod(parts[3]);
      if (parts.size() == 5) spec.baseline = std::stod(parts[4]);
    } catch (const config_error&) {
      throw;
    } catch (const std::exception&) {
      throw config_error("bad number in synth class entry: '" + entry + "'");
    }
    classes.push_back(spec);
  }
  return classes;
}

IngestConfig make_ingest_config(const RunConfig& rc) {
  IngestConfig cfg;
  cfg.root = rc.root;
  cfg.dsads_unit = rc.dsads_unit;
  cfg.dsads_activities = parse_activity_map(rc.dsads_map);
  cfg.pamap_activities = parse_activity_id_map(rc.pamap_map);
  cfg.pamap_subjects = rc.pamap_subjects;
  cfg.nan_policy = nan_policy_from_string(rc.nan_policy);
  cfg.max_interp_gap = rc.max_interp_gap;
  return cfg;
}

SynthSpec make_synth_spec(const RunConfig& rc) {
  SynthSpec spec;
  spec.classes = parse_synth_classes(rc.synth_classes);
  spec.subjects = rc.synth_subjects;
  spec.segments_per_class = rc.synth_segments;
  spec.samples_per_segment = rc.synth_samples;
  spec.sample_rate_hz = rc.synth_rate;
  spec.subject_scale_step = rc.synth_subject_step;
  spec.amplitude_scale = rc.synth_amplitude_scale;
  return spec;
}

CalibrationConfig make_calib_config(const RunConfig& rc) {
  CalibrationConfig cfg;
  cfg.learning_rate = rc.learning_rate;
  cfg.batch_size = rc.batch_size;
  cfg.max_epochs = rc.max_epochs;
  cfg.validation_fraction = rc.validation_fraction;
  cfg.patience = rc.patience;
  cfg.seed = mix(rc.seed, 0x63616cu);
  cfg.gradient_mode = gradient_mode_from_string(rc.gradient_mode);
  return cfg;
}

TrainConfig make_train_config(const RunConfig& rc) {
  TrainConfig cfg = rc.train;
  cfg.seed = mix(rc.seed, 0x747261u);
  return cfg;
}

int native_window(const RunConfig& rc) {
  if (rc.window > 0) return rc.window;
  if (rc.dataset == "dsads") return 25;
  if (rc.dataset == "pamap2") return 100;
  return static_cast<int>(std::lround(rc.synth_rate));
}

void validate(const RunConfig& rc) {
  if (rc.dataset != "dsads" && rc.dataset != "pamap2" && rc.dataset != "synth") {
    throw config_error("unknown dataset '" + rc.dataset + "' (dsads | pamap2 | synth)");
  }
  if (rc.window < 0) throw config_error("window must be non-negative");
  if (native_window(rc) < 2) throw config_error("window must hold at least 2 samples");
  if (rc.repetitions < 1) throw config_error("repetitions must be at least 1");
  if (rc.threads < 0) throw config_error("threads must be non-negative");
  if (rc.train.n_rounds < 1) throw config_error("rounds must be at least 1");
  if (rc.train.max_depth < 1) throw config_error("max_depth must be at least 1");
  if (rc.train.min_samples_leaf < 1) throw config_error("min_samples_leaf must be at least 1");
  if (!(rc.train.shrinkage > 0.0) || rc.train.shrinkage > 1.0) {
    throw config_error("shrinkage must be in (0, 1]");
  }
  if (!(rc.train.subsample > 0.0) || rc.train.subsample > 1.0) {
    throw config_error("subsample must be in (0, 1]");
  }
  if (!(rc.learning_rate > 0.0)) throw config_error("learning_rate must be positive");
  if (rc.batch_size < 1) throw config_error("batch_size must be at least 1");
  if (rc.max_epochs < 0) throw config_error("max_epochs must be non-negative");
  if (!(rc.validation_fraction > 0.0) || !(rc.validation_fraction < 1.0)) {
    throw config_error("validation_fraction must be in (0, 1)");
  }
  if (rc.max_interp_gap < 1) throw config_error("max_interp_gap must be at least 1");
  if (rc.synth_subjects < 1 || rc.synth_segments < 1 || rc.synth_samples < 2) {
    throw config_error("synth fixture needs at least 1 subject, 1 segment, 2 samples");
  }
  if (!(rc.synth_rate > 0.0)) throw config_error("synth_rate must be positive");
  nan_policy_from_string(rc.nan_policy);
  gradient_mode_from_string(rc.gradient_mode);
  parse_activity_map(rc.dsads_map);
  parse_activity_id_map(rc.pamap_map);
  parse_synth_classes(rc.synth_classes);
}

std::string canonical_config(const RunConfig& rc) {
  char buf[64];
  std::ostringstream ss;
  auto put = [&](const char* key, const std::string& value) { ss << key << '=' << value << '\n'; };
  auto put_d = [&](const char* key, double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    put(key, buf);
  };
  put("dataset", rc.dataset);
  put("root", rc.root);
  put("seed", std::to_string(rc.seed));
  put("window", std::to_string(native_window(rc)));
  put("repetitions", std::to_string(rc.repetitions));
  put("dsads_unit", rc.dsads_unit);
  put("dsads_map", rc.dsads_map);
  put("pamap_map", rc.pamap_map);
  {
    std::string subjects;
    for (int s : rc.pamap_subjects) subjects += std::to_string(s) + ",";
    put("pamap_subjects", subjects);
  }
  put("nan_policy", rc.nan_policy);
  put("max_interp_gap", std::to_string(rc.max_interp_gap));
  put("rounds", std::to_string(rc.train.n_rounds));
  put("max_depth", std::to_string(rc.train.max_depth));
  put("min_samples_leaf", std::to_string(rc.train.min_samples_leaf));
  put_d("shrinkage", rc.train.shrinkage);
  put_d("subsample", rc.train.subsample);
  put_d("learning_rate", rc.learning_rate);
  put("batch_size", std::to_string(rc.batch_size));
  put("max_epochs", std::to_string(rc.max_epochs));
  put_d("validation_fraction", rc.validation_fraction);
  put("patience", std::to_string(rc.patience));
  put("gradient_mode", rc.gradient_mode);
  put("synth_classes", rc.synth_classes);
  put("synth_subjects", std::to_string(rc.synth_subjects));
  put("synth_segments", std::to_string(rc.synth_segments));
  put("synth_samples", std::to_string(rc.synth_samples));
  put_d("synth_rate", rc.synth_rate);
  put_d("synth_subject_step", rc.synth_subject_step);
  put_d("synth_amplitude_scale", rc.synth_amplitude_scale);
  put("features_file", rc.features_file);
  return ss.str();
}

std::string config_hash(const RunConfig& rc) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_config(rc)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<FeatureInstance> load_instances(const RunConfig& rc, Exec exec) {
  if (!rc.features_file.empty()) return read_feature_csv(rc.features_file);
  std::vector<RecordingSegment> segments;
  if (rc.dataset == "synth") {
    segments = synth_generate(make_synth_spec(rc), rc.seed);
  } else {
    if (rc.root.empty()) {
      throw config_error("dataset '" + rc.dataset +
                         "' needs --root or the ACTIBOOST_DATA_ROOT environment variable");
    }
    const IngestConfig cfg = make_ingest_config(rc);
    segments = rc.dataset == "dsads" ? parse_dsads(rc.root, cfg) : parse_pamap2(rc.root, cfg);
  }
  return extract_instances(segments, WindowSpec{native_window(rc)}, exec);
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open for writing: " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw data_error("failed writing: " + path.string());
}

json count_manifest(const std::vector<FeatureInstance>& instances) {
  std::map<int, std::map<std::string, long>> counts;
  std::set<std::string> classes;
  for (const FeatureInstance& inst : instances) {
    ++counts[inst.subject_id][to_string(inst.label)];
    classes.insert(to_string(inst.label));
  }
  json by_subject = json::object();
  for (const auto& [subject, per_class] : counts) {
    json entry = json::object();
    for (const auto& [name, count] : per_class) entry[name] = count;
    by_subject[std::to_string(subject)] = std::move(entry);
  }
  json doc;
  doc["instances"] = instances.size();
  doc["subjects"] = counts.size();
  doc["classes"] = std::vector<std::string>(classes.begin(), classes.end());
  doc["counts"] = std::move(by_subject);
  return doc;
}

int cmd_features(const RunConfig& rc, Exec exec) {
  const std::vector<FeatureInstance> instances = load_instances(rc, exec);
  fs::create_directories(rc.out);
  const fs::path csv = fs::path(rc.out) / "features.csv";
  write_feature_csv(instances, csv.string());

  json manifest = count_manifest(instances);
  manifest["config_hash"] = config_hash(rc);
  manifest["window"] = native_window(rc);
  manifest["columns"] = feature_names();
  write_json(fs::path(rc.out) / "features_manifest.json", manifest);

  std::cout << "features: " << instances.size() << " instances, "
            << manifest["subjects"].get<long>() << " subjects, "
            << manifest["classes"].size() << " classes -> " << csv.string() << "\n";
  return 0;
}

int cmd_train(const RunConfig& rc, Exec exec) {
  const std::vector<FeatureInstance> instances = load_instances(rc, exec);
  TrainStats stats;
  const GbmModel model = train(instances, make_train_config(rc), &stats, exec);
  fs::create_directories(rc.out);
  const std::string model_path =
      rc.model.empty() ? (fs::path(rc.out) / "model.json").string() : rc.model;
  save_model(model, model_path);

  json manifest = count_manifest(instances);
  manifest["config_hash"] = config_hash(rc);
  manifest["rounds"] = model.n_rounds;
  manifest["initial_deviance"] = stats.deviance.front();
  manifest["final_deviance"] = stats.deviance.back();
  write_json(fs::path(rc.out) / "train_manifest.json", manifest);

  std::cout << "train: " << instances.size() << " instances, " << model.n_classes
            << " classes, deviance " << stats.deviance.front() << " -> "
            << stats.deviance.back() << ", model -> " << model_path << "\n";
  return 0;
}

int cmd_calibrate(const RunConfig& rc, Exec exec) {
  if (rc.model.empty()) throw config_error("calibrate needs --model");
  if (rc.user_data.empty()) throw config_error("calibrate needs --user-data");
  GbmModel model = load_model(rc.model);
  const std::vector<FeatureInstance> user = read_feature_csv(rc.user_data);
  for (const FeatureInstance& inst : user) {
    if (model.class_index(inst.label) < 0) {
      throw data_error(std::string("user data contains class ") + to_string(inst.label) +
                       " that the model does not know");
    }
  }
  const CalibrationResult result = tune(model, user, make_calib_config(rc), exec);

  fs::create_directories(rc.out);
  const std::string model_path =
      rc.model_out.empty() ? (fs::path(rc.out) / "tuned_model.json").string() : rc.model_out;
  save_model(model, model_path);
  const std::string history_path =
      rc.history.empty() ? (fs::path(rc.out) / "history.csv").string() : rc.history;
  write_history_csv(result, history_path);

  json manifest;
  manifest["config_hash"] = config_hash(rc);
  manifest["instances"] = user.size();
  manifest["epochs_run"] = result.history.size() - 1;
  manifest["selected_epoch"] = result.selected_epoch;
  manifest["initial_val_accuracy"] = result.history.front().val_accuracy;
  manifest["selected_val_accuracy"] = result.history[result.selected_epoch].val_accuracy;
  write_json(fs::path(rc.out) / "calibrate_manifest.json", manifest);

  std::cout << "calibrate: " << user.size() << " instances, selected epoch "
            << result.selected_epoch << ", val accuracy "
            << result.history.front().val_accuracy << " -> "
            << result.history[result.selected_epoch].val_accuracy << ", model -> "
            << model_path << "\n";
  return 0;
}

int cmd_experiment(const RunConfig& rc, Exec exec) {
  const std::vector<FeatureInstance> instances = load_instances(rc, exec);
  CvReport report = run_experiment(instances, make_train_config(rc), make_calib_config(rc),
                                   rc.repetitions, exec);
  report.config_hash = config_hash(rc);
  emit_report(report, rc.out, rc.roc_csv);
  std::cout << "experiment: " << report.subjects.size() << " subjects, baseline macro F1 "
            << report.baseline.pooled.macro_f1 << ", tuned "
            << report.tuned.pooled.mean.macro_f1 << ", report -> "
            << (fs::path(rc.out) / "report.json").string() << "\n";
  return 0;
}

int cmd_report(const RunConfig& rc) {
  if (rc.report_json.empty()) throw config_error("report needs --report");
  const CvReport report = load_report(rc.report_json);
  emit_report(report, rc.out, rc.roc_csv);
  std::cout << "report: " << report.subjects.size() << " subjects, baseline macro F1 "
            << report.baseline.pooled.macro_f1 << ", tuned "
            << report.tuned.pooled.mean.macro_f1 << ", tables -> " << rc.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pooled-model activity recognition with per-user weight calibration"};
  app.fallthrough();
  app.set_config("--config", "", "Key-value config file; flags override file values");

  RunConfig rc;
  app.add_option("--dataset", rc.dataset, "dsads | pamap2 | synth")->capture_default_str();
  app.add_option("--root", rc.root, "Dataset root directory")
      ->envname("ACTIBOOST_DATA_ROOT");
  app.add_option("--out", rc.out, "Output directory")->capture_default_str();
  app.add_option("--seed", rc.seed, "Global seed; fixes every output byte for synth runs")
      ->capture_default_str();
  app.add_option("--threads", rc.threads, "OpenMP thread cap; 0 keeps the runtime default")
      ->capture_default_str();
  app.add_flag("--serial", rc.serial, "Run the serial reference kernels");
  app.add_option("--window", rc.window, "Window length in samples; 0 = one second")
      ->capture_default_str();
  app.add_option("--repetitions", rc.repetitions, "Tuned-CV repetitions")
      ->capture_default_str();
  app.add_flag("--roc-csv", rc.roc_csv, "Also emit per-subject per-class ROC CSVs");

  app.add_option("--dsads-unit", rc.dsads_unit,
                 "Sensor unit: torso | right_arm | left_arm | right_leg | left_leg")
      ->capture_default_str();
  app.add_option("--dsads-map", rc.dsads_map, "class:activityDir pairs")->capture_default_str();
  app.add_option("--pamap-map", rc.pamap_map, "class:activityId pairs")->capture_default_str();
  app.add_option("--pamap-subjects", rc.pamap_subjects,
                 "Subject ids to load; empty = every subject with all classes");
  app.add_option("--nan-policy", rc.nan_policy, "drop | interpolate")->capture_default_str();
  app.add_option("--max-interp-gap", rc.max_interp_gap,
                 "Longest NaN run interpolation may bridge, in samples")
      ->capture_default_str();

  app.add_option("--rounds", rc.train.n_rounds, "Boosting rounds")->capture_default_str();
  app.add_option("--max-depth", rc.train.max_depth, "Tree depth cap")->capture_default_str();
  app.add_option("--min-samples-leaf", rc.train.min_samples_leaf, "Smallest leaf size")
      ->capture_default_str();
  app.add_option("--shrinkage", rc.train.shrinkage, "Learning rate nu, the initial weights")
      ->capture_default_str();
  app.add_option("--subsample", rc.train.subsample, "Row fraction per round")
      ->capture_default_str();

  app.add_option("--learning-rate", rc.learning_rate, "Calibration SGD step size")
      ->capture_default_str();
  app.add_option("--batch-size", rc.batch_size, "Calibration mini-batch size")
      ->capture_default_str();
  app.add_option("--max-epochs", rc.max_epochs, "Calibration epoch cap")->capture_default_str();
  app.add_option("--validation-fraction", rc.validation_fraction,
                 "Held-back fraction for snapshot selection")
      ->capture_default_str();
  app.add_option("--patience", rc.patience, "Early-stop patience; <= 0 disables")
      ->capture_default_str();
  app.add_option("--gradient-mode", rc.gradient_mode, "full_jacobian | paper_diagonal")
      ->capture_default_str();

  app.add_option("--synth-classes", rc.synth_classes,
                 "name:freq:amplitude:noise[:baseline], comma separated")
      ->capture_default_str();
  app.add_option("--synth-subjects", rc.synth_subjects, "Synthetic subject count")
      ->capture_default_str();
  app.add_option("--synth-segments", rc.synth_segments, "Segments per subject per class")
      ->capture_default_str();
  app.add_option("--synth-samples", rc.synth_samples, "Samples per segment")
      ->capture_default_str();
  app.add_option("--synth-rate", rc.synth_rate, "Synthetic sample rate in Hz")
      ->capture_default_str();
  app.add_option("--synth-subject-step", rc.synth_subject_step,
                 "Per-subject amplitude step")
      ->capture_default_str();
  app.add_option("--synth-amplitude-scale", rc.synth_amplitude_scale,
                 "Global amplitude multiplier")
      ->capture_default_str();

  app.add_option("--features-file", rc.features_file,
                 "Use this feature CSV instead of ingesting the dataset");
  app.add_option("--model", rc.model, "Model path: train writes it, calibrate reads it");
  app.add_option("--model-out", rc.model_out, "Where calibrate writes the tuned model");
  app.add_option("--user-data", rc.user_data, "Feature CSV with the target user's data");
  app.add_option("--history", rc.history, "Where calibrate writes the epoch history CSV");
  app.add_option("--report", rc.report_json, "Existing report.json to rerender");

  CLI::App* sub_features = app.add_subcommand("features", "Ingest and write the feature table");
  CLI::App* sub_train = app.add_subcommand("train", "Train a pooled model");
  CLI::App* sub_calibrate =
      app.add_subcommand("calibrate", "Retune a model's weights on one user's data");
  CLI::App* sub_experiment =
      app.add_subcommand("experiment", "One-user-out CV, baseline and tuned");
  CLI::App* sub_report = app.add_subcommand("report", "Rerender tables from a report.json");
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    validate(rc);
    if (rc.threads > 0) set_threads(rc.threads);
    const Exec exec = rc.serial ? Exec::serial : Exec::parallel;
    if (sub_features->parsed()) return cmd_features(rc, exec);
    if (sub_train->parsed()) return cmd_train(rc, exec);
    if (sub_calibrate->parsed()) return cmd_calibrate(rc, exec);
    if (sub_experiment->parsed()) return cmd_experiment(rc, exec);
    if (sub_report->parsed()) return cmd_report(rc);
    throw config_error("no subcommand given");
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
