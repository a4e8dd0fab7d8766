#pragma once

#include <string>

#include "actiboost/gbm.hpp"

namespace actiboost {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON document; see docs/model_format.md. Doubles round-trip
// exactly, so a deserialized model scores bitwise-identically.
std::string serialize_model(const GbmModel& model);
GbmModel deserialize_model(const std::string& json_text);  // data_error with location

void save_model(const GbmModel& model, const std::string& path);
GbmModel load_model(const std::string& path);

// Estimators and init scores only, no weights. Used by the
// estimator-immutability checks around calibration.
std::string serialize_trees(const GbmModel& model);

}  // namespace actiboost
