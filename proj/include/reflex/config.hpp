#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "reflex/collision_sim.hpp"
#include "reflex/sweep.hpp"
#include "reflex/two_link.hpp"

namespace reflex {

// One JSON document describing everything a run needs. Units are fixed SI
// (m, kg, N, s, rad); unknown keys are rejected. Every section is optional
// and falls back to the documented defaults.
struct RunConfig {
  CollisionParams1D params;
  MotorScalingContext motor;
  TwoLinkModel model;
  std::vector<SweepAxis> sweep_axes;
  SimOptions sim;
  std::string out_path;
  std::string out_format;
};

RunConfig default_config();

RunConfig load_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

// Full normalized document; load(dump(c)) reproduces c and dump is a fixed
// point of load-then-dump.
nlohmann::json dump_config(const RunConfig& config);

// Applies one `section.key=value` override; value parses as JSON when it can,
// otherwise as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace reflex
