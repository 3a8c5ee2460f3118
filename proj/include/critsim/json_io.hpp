// Copyright 2026 The critsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON scenario files, config overrides, the vehicle class table and run
// summaries. The file layout is documented in docs/scenario_format.md.

#ifndef CRITSIM__JSON_IO_HPP_
#define CRITSIM__JSON_IO_HPP_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "critsim/engine.hpp"
#include "critsim/errors.hpp"
#include "critsim/scenario.hpp"

namespace critsim::io
{

using nlohmann::json;

namespace detail
{

template <class T>
struct Field
{
  const char * name;
  T SimulationConfig::*member;
};

inline const std::vector<Field<double>> & double_fields()
{
  using C = SimulationConfig;
  static const std::vector<Field<double>> fields{
    {"horizon", &C::horizon},
    {"step", &C::step},
    {"max_acceleration", &C::max_acceleration},
    {"max_slip", &C::max_slip},
    {"profile_latency", &C::profile_latency},
    {"jerk_limit", &C::jerk_limit},
    {"pedestrian_max_acceleration", &C::pedestrian_max_acceleration},
    {"pedestrian_max_speed", &C::pedestrian_max_speed},
    {"pedestrian_length", &C::pedestrian_length},
    {"pedestrian_width", &C::pedestrian_width},
    {"min_model_speed", &C::min_model_speed},
    {"friction", &C::friction},
    {"slip_stiffness_per_load", &C::slip_stiffness_per_load},
    {"gravity", &C::gravity},
    {"prediction_time_base", &C::prediction_time_base},
    {"prediction_time_gain", &C::prediction_time_gain},
    {"prediction_time_max", &C::prediction_time_max},
    {"max_steering_angle", &C::max_steering_angle},
    {"max_steering_rate", &C::max_steering_rate},
    {"lane_width", &C::lane_width},
    {"weight_acceleration", &C::weight_acceleration},
    {"weight_path", &C::weight_path},
    {"acceleration_score_scale", &C::acceleration_score_scale},
    {"lateral_score_scale", &C::lateral_score_scale},
    {"lane_change_penalty", &C::lane_change_penalty},
    {"counter_traffic_penalty", &C::counter_traffic_penalty},
  };
  return fields;
}

inline const std::vector<Field<int>> & int_fields()
{
  using C = SimulationConfig;
  static const std::vector<Field<int>> fields{
    {"acceleration_profiles", &C::acceleration_profiles},
    {"own_lane_samples", &C::own_lane_samples},
    {"neighbor_lane_samples", &C::neighbor_lane_samples},
    {"co_paths", &C::co_paths},
    {"footprint_vertices", &C::footprint_vertices},
  };
  return fields;
}

template <class Fn>
auto schema_guard(const std::string & where, Fn && fn)
{
  try {
    return fn();
  } catch (const json::exception & e) {
    throw ScenarioError("schema violation in " + where + ": " + e.what());
  }
}

inline LaneId lane_from_string(const std::string & s)
{
  if (s == "left") {
    return LaneId::left;
  }
  if (s == "ego") {
    return LaneId::ego;
  }
  if (s == "right") {
    return LaneId::right;
  }
  throw ScenarioError("schema violation: unknown lane '" + s + "'");
}

inline VehicleClass class_from_string(const std::string & s)
{
  for (int c = 0; c <= static_cast<int>(VehicleClass::cargo); ++c) {
    if (to_string(static_cast<VehicleClass>(c)) == s) {
      return static_cast<VehicleClass>(c);
    }
  }
  throw ScenarioError("schema violation: unknown vehicle class '" + s + "'");
}

inline double number_or_inf(const json & j)
{
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace detail

/// Applies every key of `j` onto `config`. Unknown keys are rejected.
inline void apply_config(const json & j, SimulationConfig & config)
{
  detail::schema_guard("config", [&] {
    if (!j.is_object()) {
      throw ScenarioError("schema violation: config must be an object");
    }
    for (const auto & [key, value] : j.items()) {
      bool known = false;
      for (const auto & f : detail::double_fields()) {
        if (key == f.name) {
          config.*f.member = value.get<double>();
          known = true;
        }
      }
      for (const auto & f : detail::int_fields()) {
        if (key == f.name) {
          config.*f.member = value.get<int>();
          known = true;
        }
      }
      if (key == "sampling_instances") {
        config.sampling_instances = value.get<std::vector<double>>();
        known = true;
      } else if (key == "collision_mode") {
        const auto mode = value.get<std::string>();
        if (mode != "paper" && mode != "exact") {
          throw ScenarioError("schema violation: collision_mode must be 'paper' or 'exact'");
        }
        config.collision_mode = mode == "paper" ? CollisionMode::paper : CollisionMode::exact;
        known = true;
      } else if (key == "conditional_scaling") {
        config.conditional_scaling = value.get<bool>();
        known = true;
      }
      if (!known) {
        throw ScenarioError("schema violation: unknown config key '" + key + "'");
      }
    }
    return 0;
  });
}

inline json config_to_json(const SimulationConfig & config)
{
  json j = json::object();
  for (const auto & f : detail::double_fields()) {
    j[f.name] = config.*f.member;
  }
  for (const auto & f : detail::int_fields()) {
    j[f.name] = config.*f.member;
  }
  j["sampling_instances"] = config.sampling_instances;
  j["collision_mode"] = std::string(to_string(config.collision_mode));
  j["conditional_scaling"] = config.conditional_scaling;
  return j;
}

inline json parameters_to_json(const VehicleParameters & p)
{
  return json{
    {"class", std::string(to_string(p.vehicle_class))},
    {"mass", p.mass},
    {"yaw_inertia", p.yaw_inertia},
    {"cog_to_front", p.cog_to_front},
    {"cog_to_rear", p.cog_to_rear},
    {"cornering_stiffness_front", p.cornering_stiffness_front},
    {"cornering_stiffness_rear", p.cornering_stiffness_rear},
    {"track_width", p.track_width},
    {"max_steering_angle", p.max_steering_angle},
    {"max_steering_rate", p.max_steering_rate},
  };
}

inline VehicleParameters parameters_from_json(const json & j)
{
  VehicleParameters p;
  p.vehicle_class = detail::class_from_string(j.at("class").get<std::string>());
  p.mass = j.at("mass").get<double>();
  p.yaw_inertia = j.at("yaw_inertia").get<double>();
  p.cog_to_front = j.at("cog_to_front").get<double>();
  p.cog_to_rear = j.at("cog_to_rear").get<double>();
  p.cornering_stiffness_front = j.at("cornering_stiffness_front").get<double>();
  p.cornering_stiffness_rear = j.at("cornering_stiffness_rear").get<double>();
  p.track_width = j.at("track_width").get<double>();
  p.max_steering_angle = j.value("max_steering_angle", 0.6);
  p.max_steering_rate = j.value("max_steering_rate", 0.8);
  if (!(p.mass > 0.0 && p.yaw_inertia > 0.0 && p.cog_to_front > 0.0 && p.cog_to_rear > 0.0 &&
        p.cornering_stiffness_front > 0.0 && p.cornering_stiffness_rear > 0.0 && p.track_width > 0.0)) {
    throw ScenarioError("schema violation: vehicle parameters must be positive");
  }
  return p;
}

inline json object_to_json(const ObjectState & o)
{
  json j{
    {"id", o.id},
    {"x", o.position.x},
    {"y", o.position.y},
    {"yaw", o.yaw},
    {"v", o.velocity},
    {"beta", o.sideslip},
    {"yaw_rate", o.yaw_rate},
    {"accel", o.acceleration},
    {"length", o.length},
    {"width", o.width},
  };
  if (o.kind != ObjectKind::ego_vehicle) {
    j["kind"] = std::string(to_string(o.kind));
  }
  if (o.height) {
    j["height"] = *o.height;
  }
  return j;
}

inline ObjectState object_from_json(const json & j, ObjectKind default_kind)
{
  static const std::vector<std::string> known{
    "id", "kind", "x", "y", "yaw", "v", "beta", "yaw_rate", "accel", "length", "width", "height", "params"};
  for (const auto & [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ScenarioError("schema violation: unknown object key '" + key + "'");
    }
  }
  ObjectState o;
  o.kind = default_kind;
  if (j.contains("kind")) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "vehicle") {
      o.kind = ObjectKind::co_vehicle;
    } else if (kind == "pedestrian") {
      o.kind = ObjectKind::pedestrian;
    } else {
      throw ScenarioError("schema violation: unknown object kind '" + kind + "'");
    }
  }
  o.id = j.value("id", 0);
  o.position = {j.at("x").get<double>(), j.at("y").get<double>()};
  o.yaw = j.value("yaw", 0.0);
  o.velocity = j.value("v", 0.0);
  o.sideslip = j.value("beta", 0.0);
  o.yaw_rate = j.value("yaw_rate", 0.0);
  o.acceleration = j.value("accel", 0.0);
  o.length = j.value("length", 0.0);
  o.width = j.value("width", 0.0);
  if (j.contains("height") && !j.at("height").is_null()) {
    o.height = j.at("height").get<double>();
  }
  return o;
}

inline RawScenario scenario_from_json(const json & j)
{
  return detail::schema_guard("scenario", [&] {
    if (!j.is_object()) {
      throw ScenarioError("schema violation: scenario must be a JSON object");
    }
    static const std::vector<std::string> known{"timestamp", "ego", "objects", "dividers", "counter_traffic_lanes",
                                                "config"};
    for (const auto & [key, value] : j.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ScenarioError("schema violation: unknown top-level key '" + key + "'");
      }
    }
    RawScenario raw;
    raw.timestamp = j.value("timestamp", 0.0);
    if (j.contains("ego") && !j.at("ego").is_null()) {
      const json & e = j.at("ego");
      raw.ego = object_from_json(e, ObjectKind::ego_vehicle);
      raw.ego->kind = ObjectKind::ego_vehicle;
      if (e.contains("params")) {
        raw.ego_parameters = parameters_from_json(e.at("params"));
      }
    }
    for (const auto & o : j.value("objects", json::array())) {
      if (o.contains("params")) {
        throw ScenarioError("schema violation: params are only accepted on the EGO");
      }
      raw.objects.push_back(object_from_json(o, ObjectKind::co_vehicle));
    }
    for (const auto & d : j.value("dividers", json::array())) {
      if (d.size() != 3) {
        throw ScenarioError("schema violation: a divider needs exactly 3 points");
      }
      DividerTriplet t{};
      for (std::size_t i = 0; i < 3; ++i) {
        if (d[i].size() != 2) {
          throw ScenarioError("schema violation: divider points are [x, y] pairs");
        }
        t[i] = {d[i][0].get<double>(), d[i][1].get<double>()};
      }
      raw.dividers.push_back(t);
    }
    for (const auto & lane : j.value("counter_traffic_lanes", json::array())) {
      raw.counter_traffic_lanes.push_back(detail::lane_from_string(lane.get<std::string>()));
    }
    if (j.contains("config")) {
      apply_config(j.at("config"), raw.config);
    }
    return raw;
  });
}

/// Serializes a validated scenario so that reading and validating it again
/// yields an identical Scenario.
inline json scenario_to_json(const Scenario & s)
{
  json ego = object_to_json(s.ego);
  ego["params"] = parameters_to_json(s.ego_parameters);
  json objects = json::array();
  for (const auto & o : s.objects) {
    objects.push_back(object_to_json(o));
  }
  json dividers = json::array();
  for (const auto & t : s.dividers) {
    dividers.push_back(json::array({{t[0].x, t[0].y}, {t[1].x, t[1].y}, {t[2].x, t[2].y}}));
  }
  json lanes = json::array();
  for (auto lane : s.counter_traffic_lanes) {
    lanes.push_back(std::string(to_string(lane)));
  }
  return json{
    {"timestamp", s.timestamp},
    {"ego", ego},
    {"objects", objects},
    {"dividers", dividers},
    {"counter_traffic_lanes", lanes},
    {"config", config_to_json(s.config)},
  };
}

inline json read_json_file(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw ScenarioError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::exception & e) {
    throw ScenarioError("schema violation in " + path.string() + ": " + e.what());
  }
}

inline RawScenario read_scenario_file(const std::filesystem::path & path)
{
  return scenario_from_json(read_json_file(path));
}

/// All *.json files of a replay directory, ordered by file name.
inline std::vector<std::filesystem::path> replay_frames(const std::filesystem::path & dir)
{
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

/// Versioned class table, see data/vehicle_classes.json.
inline std::vector<VehicleClassRecord> vehicle_class_table_from_json(const json & j)
{
  return detail::schema_guard("vehicle class table", [&] {
    if (j.at("version").get<int>() != kVehicleClassTableVersion) {
      throw ScenarioError("unsupported vehicle class table version");
    }
    std::vector<VehicleClassRecord> table;
    for (const auto & row : j.at("classes")) {
      VehicleClassRecord r{};
      r.parameters = parameters_from_json(row);
      r.vehicle_class = r.parameters.vehicle_class;
      r.tall = row.at("tall").get<bool>();
      r.max_length = detail::number_or_inf(row.at("max_length"));
      r.max_width = detail::number_or_inf(row.at("max_width"));
      table.push_back(r);
    }
    return table;
  });
}

inline json result_to_json(const CriticalityResult & r, std::size_t escape_routes = 3)
{
  json cos = json::array();
  for (std::size_t k = 0; k < r.co_ids.size(); ++k) {
    cos.push_back({{"id", r.co_ids[k]}, {"probability", r.co_probability[k]}});
  }
  json escapes = json::array();
  for (std::size_t k = 0; k < std::min(escape_routes, r.escape_routes.size()); ++k) {
    escapes.push_back({{"ego_trajectory", r.escape_routes[k].ego}, {"probability", r.escape_routes[k].probability}});
  }
  return json{
    {"timestamp", r.timestamp},
    {"p_cra", r.p_cra},
    {"p_unscaled", r.p_unscaled},
    {"colliding_combinations", r.collisions.size()},
    {"escape_route_count", r.escape_routes.size()},
    {"co", cos},
    {"escape_routes", escapes},
  };
}

inline json metrics_to_json(const RunMetrics & m)
{
  return json{
    {"workers", m.workers},
    {"trajectories", m.trajectories},
    {"ego_trajectories", m.ego_trajectories},
    {"co_trajectories", m.co_trajectories},
    {"trajectory_combinations", m.trajectory_combinations},
    {"pose_combinations", m.pose_combinations},
    {"pose_combinations_per_second", m.pose_combinations_per_second},
    {"stage_ms",
     {{"street", m.timings.street_ms},
      {"trajectories", m.timings.trajectories_ms},
      {"collision", m.timings.collision_ms},
      {"risk", m.timings.risk_ms},
      {"total", m.timings.total_ms()}}},
  };
}

}  // namespace critsim::io

#endif  // CRITSIM__JSON_IO_HPP_
