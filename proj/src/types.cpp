#include "actiboost/types.hpp"

#include "actiboost/errors.hpp"

namespace actiboost {

const char* to_string(Activity a) {
  switch (a) {
    case Activity::bike:
      return "bike";
    case Activity::rest:
      return "rest";
    case Activity::run:
      return "run";
    case Activity::walk:
      return "walk";
  }
  return "?";
}

Activity activity_from_string(const std::string& name) {
  if (name == "bike") return Activity::bike;
  if (name == "rest") return Activity::rest;
  if (name == "run") return Activity::run;
  if (name == "walk") return Activity::walk;
  throw config_error("unknown activity name: '" + name + "'");
}

}  // namespace actiboost
