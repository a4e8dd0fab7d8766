#include "actiboost/dataset_layout.hpp"

#include "actiboost/errors.hpp"

namespace actiboost::layout {

int dsads_unit_acc_column(const std::string& unit) {
  int unit_index;
  if (unit == "torso") {
    unit_index = 0;
  } else if (unit == "right_arm") {
    unit_index = 1;
  } else if (unit == "left_arm") {
    unit_index = 2;
  } else if (unit == "right_leg") {
    unit_index = 3;
  } else if (unit == "left_leg") {
    unit_index = 4;
  } else {
    throw config_error("unknown sensor unit '" + unit +
                       "' (expected torso, right_arm, left_arm, right_leg or left_leg)");
  }
  return unit_index * kDsadsChannelsPerUnit;
}

}  // namespace actiboost::layout
