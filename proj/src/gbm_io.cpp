#include "actiboost/gbm_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "actiboost/errors.hpp"

namespace actiboost {

using nlohmann::json;

namespace {

json tree_to_json(const RegressionTree& tree) {
  json nodes = json::array();
  for (const TreeNode& nd : tree.nodes) {
    if (nd.is_leaf()) {
      nodes.push_back({{"value", nd.value}});
    } else {
      nodes.push_back({{"feature", nd.feature},
                       {"threshold", nd.threshold},
                       {"left", nd.left},
                       {"right", nd.right}});
    }
  }
  return nodes;
}

RegressionTree tree_from_json(const json& nodes) {
  RegressionTree tree;
  if (!nodes.is_array() || nodes.empty()) {
    throw data_error("model: tree node list must be a non-empty array");
  }
  const int count = static_cast<int>(nodes.size());
  tree.nodes.reserve(count);
  for (const json& nd : nodes) {
    TreeNode out;
    if (nd.contains("feature")) {
      out.feature = nd.at("feature").get<int>();
      out.threshold = nd.at("threshold").get<double>();
      out.left = nd.at("left").get<int>();
      out.right = nd.at("right").get<int>();
      if (out.feature < 0 || out.feature >= kFeatureCount) {
        throw data_error("model: split feature index out of range: " +
                         std::to_string(out.feature));
      }
      if (out.left < 0 || out.left >= count || out.right < 0 || out.right >= count) {
        throw data_error("model: tree child index out of range");
      }
    } else {
      out.value = nd.at("value").get<double>();
    }
    tree.nodes.push_back(out);
  }
  return tree;
}

json estimators_to_json(const GbmModel& model) {
  json rounds = json::array();
  for (const auto& round : model.estimators) {
    json per_class = json::array();
    for (const RegressionTree& tree : round) per_class.push_back(tree_to_json(tree));
    rounds.push_back(std::move(per_class));
  }
  return rounds;
}

}  // namespace

std::string serialize_model(const GbmModel& model) {
  json doc;
  doc["format"] = "actiboost-gbm";
  doc["version"] = kModelFormatVersion;
  doc["n_classes"] = model.n_classes;
  doc["n_rounds"] = model.n_rounds;
  doc["class_names"] = model.class_names;
  doc["init_scores"] = model.init_scores;
  doc["shrinkage"] = model.shrinkage;
  doc["weights"] = model.weights;  // row-major [round][class]
  doc["estimators"] = estimators_to_json(model);
  return doc.dump(2);
}

GbmModel deserialize_model(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("model: invalid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != "actiboost-gbm") {
      throw data_error("model: unrecognized format tag");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw data_error("model: unsupported version " + std::to_string(version));
    }
    GbmModel model;
    model.n_classes = doc.at("n_classes").get<int>();
    model.n_rounds = doc.at("n_rounds").get<int>();
    model.class_names = doc.at("class_names").get<std::vector<std::string>>();
    model.init_scores = doc.at("init_scores").get<std::vector<double>>();
    model.shrinkage = doc.at("shrinkage").get<double>();
    model.weights = doc.at("weights").get<std::vector<double>>();
    if (model.n_classes < 2 || model.n_rounds < 1) {
      throw data_error("model: n_classes/n_rounds out of range");
    }
    const std::size_t l = static_cast<std::size_t>(model.n_classes);
    if (model.class_names.size() != l || model.init_scores.size() != l) {
      throw data_error("model: class_names/init_scores length mismatch");
    }
    if (model.weights.size() != static_cast<std::size_t>(model.n_rounds) * l) {
      throw data_error("model: weight matrix has wrong size");
    }
    const json& rounds = doc.at("estimators");
    if (!rounds.is_array() || rounds.size() != static_cast<std::size_t>(model.n_rounds)) {
      throw data_error("model: estimator round count mismatch");
    }
    model.estimators.reserve(rounds.size());
    for (const json& per_class : rounds) {
      if (!per_class.is_array() || per_class.size() != l) {
        throw data_error("model: estimator class count mismatch");
      }
      std::vector<RegressionTree> trees;
      trees.reserve(l);
      for (const json& nodes : per_class) trees.push_back(tree_from_json(nodes));
      model.estimators.push_back(std::move(trees));
    }
    return model;
  } catch (const json::exception& e) {
    throw data_error(std::string("model: malformed document: ") + e.what());
  }
}

void save_model(const GbmModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open model file for writing: " + path);
  out << serialize_model(model) << '\n';
  if (!out) throw data_error("failed writing model file: " + path);
}

GbmModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(text);
}

std::string serialize_trees(const GbmModel& model) {
  json doc;
  doc["init_scores"] = model.init_scores;
  doc["estimators"] = estimators_to_json(model);
  return doc.dump();
}

}  // namespace actiboost
